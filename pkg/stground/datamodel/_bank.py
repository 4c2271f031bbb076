import numpy as np

from .._utils import float32_list, widen_float32
from ..exceptions import SchemaError
from ._records import Record


class LabelClass:
    def __init__(self, class_id, name, words, sentence):
        self.class_id = int(class_id)
        self.name = str(name)
        self.words = [np.asarray(w, dtype=np.float64) for w in words]
        self.sentence = np.asarray(sentence, dtype=np.float64)

    def __repr__(self):
        return f"LabelClass(class_id={self.class_id}, name='{self.name}')"


class LabelBank(Record):
    """The pool of action descriptions, indexed densely by class id."""

    def __init__(self, classes, source='<memory>'):
        self.classes = sorted(classes, key=lambda c: c.class_id)
        self.validate(source)

    def __repr__(self):
        return f"LabelBank(classes={[c.name for c in self.classes]})"

    def __len__(self):
        return len(self.classes)

    def __getitem__(self, class_id):
        return self.classes[class_id]

    @property
    def dim(self):
        return self.classes[0].sentence.shape[0]

    @property
    def sentences(self):
        return np.stack([c.sentence for c in self.classes])

    def vocabulary(self):
        """
        All class words stacked in class order, with the word positions
        belonging to each class.
        """

        vectors, positions = [], {}
        for c in self.classes:
            positions[c.class_id] = list(range(len(vectors), len(vectors) + len(c.words)))
            vectors.extend(c.words)
        return np.stack(vectors), positions

    def validate(self, source='<memory>'):
        if not self.classes:
            raise SchemaError(source, 'label bank must not be empty')
        if [c.class_id for c in self.classes] != list(range(len(self.classes))):
            raise SchemaError(source, 'class ids must be dense 0..C-1')
        if len({c.name for c in self.classes}) != len(self.classes):
            raise SchemaError(source, 'class names must be unique')
        d = self.classes[0].sentence.shape
        for c in self.classes:
            if not c.words:
                raise SchemaError(source, f"class `{c.name}` has no words")
            if c.sentence.shape != d or any(w.shape != d for w in c.words):
                raise SchemaError(source, f"class `{c.name}` vectors must all have dim {d}")

    def to_dict(self):
        return {
            'classes': [
                {
                    'class_id': c.class_id,
                    'name': c.name,
                    'words': [float32_list(w) for w in c.words],
                    'sentence': float32_list(c.sentence),
                }
                for c in self.classes
            ]
        }

    @classmethod
    def from_dict(cls, d, source='<memory>', line=None):
        classes = []
        for c in cls.require(d, 'classes', source, line):
            req = lambda field: cls.require(c, field, source, line)
            classes.append(LabelClass(
                req('class_id'), req('name'),
                [widen_float32(w) for w in req('words')],
                widen_float32(req('sentence')),
            ))
        return cls(classes, source=source)
