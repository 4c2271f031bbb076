import json
from pathlib import Path

import numpy as np


def widen_float32(values):
    """Rounds to 32-bit precision and widens back, the exact in-memory image of a stored value."""
    return np.asarray(values, dtype=np.float64).astype(np.float32).astype(np.float64)


def float32_list(arr):
    # repr of the widened value parses back to the same float64 bit pattern
    return widen_float32(arr).tolist()


def dumps(obj, indent=None):
    """Canonical JSON used for every output file: sorted keys, no trailing spaces."""
    return json.dumps(obj, sort_keys=True, indent=indent, ensure_ascii=False, separators=(',', ': ') if indent else (',', ':'))


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj, indent=1) + '\n', encoding='utf8')


def write_jsonl(path, records):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf8', newline='\n') as f:
        for record in records:
            f.write(dumps(record))
            f.write('\n')


def iter_lines(path):
    """Yields `(line_number, line)` for non-empty lines, 1-based."""
    with open(path, encoding='utf8') as f:
        for number, line in enumerate(f, start=1):
            line = line.strip()
            if line:
                yield number, line


def parse_float_list(s):
    return [float(v) for v in s.split(',') if v.strip()]


def label_runs(labels, background):
    """
    Maximal runs of identical non-background labels as `(label, start, end)`,
    `end` exclusive, in temporal order.
    """

    runs = []
    start = None
    current = background
    for i, label in enumerate(list(labels) + [background]):
        if label == current:
            continue
        if current != background:
            runs.append((current, start, i))
        current = label
        start = i
    return runs
