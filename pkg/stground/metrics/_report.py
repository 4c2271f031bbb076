import math

from .._constants import FORMAT_VERSION
from .._utils import write_json
from ..datamodel import Record
from ..exceptions import SchemaError


class EvalReport(Record):
    """
    Result of one metric on one dataset: headline values, a per-class
    breakdown, raw counts and the thresholds used.
    """

    def __init__(self, metric, values, per_class=None, counts=None, config=None, dataset='', source='<memory>'):
        self.metric = metric
        self.values = {str(k): float(v) for k, v in values.items()}
        self.per_class = {str(k): float(v) for k, v in (per_class or {}).items()}
        self.counts = {str(k): int(v) for k, v in (counts or {}).items()}
        self.config = dict(config or {})
        self.dataset = dataset
        self.validate(source)

    def __repr__(self):
        return f"EvalReport(metric='{self.metric}', values={self.values})"

    def validate(self, source='<memory>'):
        for key, value in {**self.values, **self.per_class}.items():
            if math.isnan(value) or not 0 <= value <= 1:
                raise SchemaError(source, f"metric value `{key}` = {value} outside [0, 1]")
        if any(v < 0 for v in self.counts.values()):
            raise SchemaError(source, 'counts must be non-negative')

    def to_dict(self):
        return {
            'dataset': self.dataset,
            'metric': self.metric,
            'values': self.values,
            'per_class': self.per_class,
            'counts': self.counts,
            'config': self.config,
        }

    @classmethod
    def from_dict(cls, d, source='<memory>', line=None):
        req = lambda field: cls.require(d, field, source, line)
        return cls(
            req('metric'), req('values'), d.get('per_class'), d.get('counts'),
            d.get('config'), d.get('dataset', ''), source=source,
        )


def load_reports(path):
    """A report file holds either one report or a list of them under `reports`."""
    data = EvalReport.read_json(path)
    items = data['reports'] if 'reports' in data else [data]
    return [EvalReport.from_dict(item, str(path)) for item in items]


def save_reports(reports, path, run_config=None):
    write_json(path, {
        'format_version': FORMAT_VERSION,
        'run_config': run_config or {},
        'reports': [r.to_dict() for r in reports],
    })


def merge_reports(reports):
    """`{(dataset, metric): {value name: value}}` with later reports overriding earlier ones."""
    table = {}
    for report in reports:
        table.setdefault((report.dataset, report.metric), {}).update(report.values)
    return dict(sorted(table.items()))


def format_table(table):
    rows = [('dataset', 'metric', 'value', 'score')]
    for (dataset, metric), values in table.items():
        for name in sorted(values):
            rows.append((dataset or '-', metric, name, f"{values[name]:.4f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    return '\n'.join('  '.join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows)
