import json
import logging
from pathlib import Path

from .._constants import FORMAT_VERSION
from .._utils import dumps, iter_lines
from ..exceptions import ParseError, SchemaError


class Record:
    """Base for every file-backed object: dict conversion, JSON view and loaders."""

    FIELDS = ()

    def to_dict(self):
        raise NotImplementedError

    @classmethod
    def from_dict(cls, d, source='<memory>', line=None):
        raise NotImplementedError

    @property
    def json(self):
        return dumps(self.to_dict(), indent=4)

    @staticmethod
    def require(d, field, source, line=None):
        if not isinstance(d, dict):
            raise ParseError(source, line=line, reason='expected a JSON object')
        if field not in d:
            raise ParseError(source, field=field, line=line, reason='missing field')
        return d[field]

    @staticmethod
    def check_version(d, source, line=None):
        if not isinstance(d, dict) or 'format_version' not in d:
            raise ParseError(source, field='format_version', line=line, reason='missing field')
        version = d['format_version']
        if version != FORMAT_VERSION:
            raise SchemaError(source, f"unsupported format_version {version}", line)

    @classmethod
    def read_json(cls, path):
        path = Path(path)
        logging.info(f"loading {cls.__name__} from `{path}`")
        try:
            d = json.loads(path.read_text(encoding='utf8'))
        except json.JSONDecodeError as e:
            raise ParseError(str(path), line=e.lineno, reason=e.msg)
        cls.check_version(d, str(path))
        return d

    @classmethod
    def load(cls, path):
        return cls.from_dict(cls.read_json(path), source=str(Path(path)))

    def save(self, path, run_config=None):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        d = {'format_version': FORMAT_VERSION, **self.to_dict()}
        if run_config is not None:
            d['run_config'] = run_config
        path.write_text(dumps(d, indent=1) + '\n', encoding='utf8')
        logging.info(f"saved {type(self).__name__} to `{path}`")


def load_jsonl(cls, path):
    """
    Loads one record per line. The first line must be a header
    (`"kind": "header"`) carrying `format_version`; later header lines are
    checked and skipped.
    """

    path = Path(path)
    records = []
    header_seen = False
    for number, line in iter_lines(path):
        try:
            d = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(str(path), line=number, reason=e.msg)
        if isinstance(d, dict) and d.get('kind') == 'header':
            Record.check_version(d, str(path), number)
            header_seen = True
            continue
        if not header_seen:
            raise ParseError(str(path), field='format_version', line=number, reason='expected a header line first')
        records.append(cls.from_dict(d, source=str(path), line=number))
    if not header_seen:
        raise ParseError(str(path), field='format_version', reason='no header line')
    logging.info(f"loaded {len(records)} {cls.__name__} records from `{path}`")
    return records


def save_jsonl(records, path, run_config=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {'kind': 'header', 'format_version': FORMAT_VERSION}
    if run_config is not None:
        header['run_config'] = run_config
    with open(path, 'w', encoding='utf8', newline='\n') as f:
        f.write(dumps(header) + '\n')
        for record in records:
            f.write(dumps(record.to_dict()) + '\n')
    logging.info(f"saved {len(records)} records to `{path}`")
