import numpy as np
import pytest

from stground import BACKGROUND, Metrics
from stground.datamodel import FrameRecord, GtSegment, SpatioTemporalPrediction, VideoGt
from stground.exceptions import ConfigError, NoSamplesError, SchemaError
from stground.metrics import (
    EvalReport,
    average_precision,
    evaluate,
    format_table,
    interval_iod_jaccard,
    iod_jaccard,
    iou_pointing_game,
    load_reports,
    merge_reports,
    pointing_game,
    restrict,
    save_reports,
    spatial_map,
    temporal_metrics,
    threshold_sweep,
    video_map,
)
from stground.numcore import Rng


# 2 x 2 token grid on a 100 x 100 frame: cell centers at 25 and 75
SIZE = 100.0
CELLS = 4
BOX_CELL0 = [0.0, 0.0, 50.0, 50.0]
BOX_ALL = [0.0, 0.0, 100.0, 100.0]


def _gt(video_id, segments, num_frames=6):
    """`segments` holds `(class_id, start, end, box)`."""
    return VideoGt(video_id, SIZE, SIZE, num_frames, [GtSegment(c, s, e, [box]*(e - s)) for c, s, e, box in segments])


def _frame(video_id, index, label, score=0.5, point=None, mask=None):
    if label == BACKGROUND:
        return FrameRecord(video_id, index, BACKGROUND, score, np.zeros(CELLS), None, np.zeros(CELLS, dtype=bool))
    mask = np.asarray(mask if mask is not None else [True, False, False, False])
    return FrameRecord(video_id, index, label, score, mask.astype(float), point or (25.0, 25.0), mask)


def _pred(video_id, frames):
    return SpatioTemporalPrediction(video_id, frames)


def _cells(box):
    xs, ys = np.array([25.0, 75.0, 25.0, 75.0]), np.array([25.0, 25.0, 75.0, 75.0])
    x0, y0, x1, y1 = box
    return (xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1)


def test_average_precision():
    assert average_precision([True, True], 2) == 1.0
    assert average_precision([False, True], 1) == 0.5
    assert average_precision([True, False, True], 2) == pytest.approx((1 + 2/3)/2)
    assert average_precision([True], 4) == 0.25
    assert average_precision([], 3) == 0.0


@pytest.mark.parametrize('point,expected', [((25.0, 25.0), 1.0), ((75.0, 75.0), 0.0), ((0.0, 30.0), 1.0), ((50.0, 50.0), 1.0)])
def test_pointing_game_single_frame(point, expected):
    gts = [_gt('v', [(0, 0, 1, BOX_CELL0)], num_frames=1)]
    preds = [_pred('v', [_frame('v', 0, 0, point=point)])]
    report = pointing_game(preds, gts)
    assert report.values['accuracy'] == expected
    assert report.counts['hits'] + report.counts['misses'] == 1


def test_pointing_game_counts_missing_points_as_misses():
    gts = [_gt('v', [(0, 0, 2, BOX_CELL0)], num_frames=2)]
    preds = [_pred('v', [_frame('v', 0, 0), _frame('v', 1, BACKGROUND)])]
    report = pointing_game(preds, gts)
    assert report.values['accuracy'] == 0.5
    assert report.counts == {'hits': 1, 'misses': 1}


def test_pointing_game_without_samples():
    with pytest.raises(NoSamplesError):
        pointing_game([], [_gt('v', [(0, 0, 1, BOX_CELL0)])])


def test_spatial_map_perfect_and_empty():
    gts = [_gt('v', [(0, 0, 2, BOX_CELL0), (1, 3, 5, BOX_ALL)])]
    perfect = _pred('v', [
        _frame('v', 0, 0), _frame('v', 1, 0), _frame('v', 2, BACKGROUND),
        _frame('v', 3, 1, mask=[True]*4), _frame('v', 4, 1, mask=[True]*4), _frame('v', 5, BACKGROUND),
    ])
    assert spatial_map([perfect], gts).values['mAP'] == 1.0
    empty = _pred('v', [_frame('v', i, 0, mask=[False]*4) for i in range(6)])
    assert spatial_map([empty], gts).values['mAP'] == 0.0


def _reference_ap(correct, num_gt):
    """Area under the interpolated precision/recall curve, summed over recall steps."""
    if num_gt == 0:
        return 0.0
    area, tp, previous_recall = 0.0, 0, 0.0
    precisions = [sum(correct[:i + 1])/(i + 1) for i in range(len(correct))]
    for i, hit in enumerate(correct):
        if not hit:
            continue
        tp += 1
        recall = tp/num_gt
        area += (recall - previous_recall)*max(precisions[i:])
        previous_recall = recall
    return area


def _random_instance(seed, classes=2, videos=2, frames=6):
    rng = Rng(seed)
    gts, preds = [], []
    for v in range(videos):
        r = rng.child(v)
        video_id = f"v{v}"
        start = int(r.integers(0, frames - 1))
        end = int(r.integers(start + 1, frames + 1))
        x0, y0 = float(r.integers(0, 60)), float(r.integers(0, 60))
        box = [x0, y0, x0 + float(r.integers(10, 40)), y0 + float(r.integers(10, 40))]
        gts.append(_gt(video_id, [(int(r.integers(0, classes)), start, end, box)], num_frames=frames))
        records = []
        for f in range(frames):
            label = int(r.integers(-1, classes))
            mask = r.random(CELLS) < 0.5
            records.append(_frame(video_id, f, label, score=float(r.random()), mask=mask))
        preds.append(_pred(video_id, records))
    return preds, gts


def _reference_spatial_map(preds, gts, thr):
    boxes = {(g.video_id, f): (s.class_id, s.box_at(f)) for g in gts for s in g.segments for f in s.frames}
    classes = sorted({c for c, _ in boxes.values()})
    aps = []
    for c in classes:
        dets = []
        for p in preds:
            for f in p.frames:
                if f.label != c:
                    continue
                gt = boxes.get((p.video_id, f.frame_index))
                correct = False
                if gt is not None and gt[0] == c:
                    cells = _cells(gt[1])
                    union = np.sum(cells | f.mask)
                    correct = union > 0 and np.sum(cells & f.mask)/union > thr
                dets.append((-f.score, p.video_id, f.frame_index, bool(correct)))
        dets.sort()
        aps.append(_reference_ap([d[3] for d in dets], sum(1 for k, _ in boxes.values() if k == c)))
    return float(np.mean(aps))


def test_spatial_map_matches_reference():
    for seed in range(50):
        preds, gts = _random_instance(seed)
        report = spatial_map(preds, gts, 0.3)
        assert report.values['mAP'] == pytest.approx(_reference_spatial_map(preds, gts, 0.3), abs=1e-9)


def _perfect_video_prediction(gt):
    labels = gt.frame_labels()
    boxes = gt.frame_boxes()
    return _pred(gt.video_id, [
        _frame(gt.video_id, f, label, mask=_cells(boxes[f][1])) if label != BACKGROUND else _frame(gt.video_id, f, BACKGROUND)
        for f, label in enumerate(labels)
    ])


def test_video_map_perfect_prediction():
    gts = [
        _gt('a', [(0, 0, 2, BOX_CELL0), (1, 3, 6, BOX_ALL)]),
        _gt('b', [(1, 1, 4, [50.0, 50.0, 100.0, 100.0])]),
    ]
    report = video_map([_perfect_video_prediction(g) for g in gts], gts)
    assert report.values == {key: 1.0 for key in ('0.1', '0.2', '0.3', '0.4', '0.5')}
    assert report.counts['gt'] == 3


def test_video_map_drops_with_threshold():
    gts = [_gt('a', [(0, 0, 4, BOX_ALL)]), _gt('b', [(0, 0, 4, BOX_ALL)])]
    preds = [
        _pred('a', [_frame('a', f, 0, score=0.9, mask=[True, True, False, False]) for f in range(4)]),
        _pred('b', [_frame('b', f, 0, score=0.8, mask=[True, False, False, False]) for f in range(4)]),
    ]
    values = video_map(preds, gts, (0.2, 0.3, 0.5, 0.6)).values
    assert values == {'0.2': 1.0, '0.3': 0.5, '0.5': 0.5, '0.6': 0.0}


def _reference_video_map(preds, gts, thr):
    tubes = {}
    for g in gts:
        for i, s in enumerate(g.segments):
            tubes[(g.video_id, i)] = (s.class_id, {(f, c) for f in s.frames for c in np.flatnonzero(_cells(s.box_at(f)))})
    aps = []
    for c in sorted({k for k, _ in tubes.values()}):
        dets = []
        for p in preds:
            for s in p.segments:
                if s.class_id == c:
                    voxels = {(f.frame_index, cell) for f in p.frames if s.start <= f.frame_index < s.end for cell in np.flatnonzero(f.mask)}
                    dets.append((-s.confidence, p.video_id, s.start, voxels))
        dets.sort(key=lambda d: d[:3])
        used, hits = set(), []
        for _, video_id, _, voxels in dets:
            candidates = [
                (len(voxels & t)/len(voxels | t) if voxels | t else 0.0, key)
                for key, (k, t) in sorted(tubes.items()) if k == c and key[0] == video_id and key not in used
            ]
            best = max(candidates, key=lambda x: x[0], default=None)
            hit = best is not None and best[0] >= thr
            if hit:
                used.add(best[1])
            hits.append(hit)
        aps.append(_reference_ap(hits, sum(1 for k, _ in tubes.values() if k == c)))
    return float(np.mean(aps))


def test_video_map_matches_reference():
    for seed in range(50):
        preds, gts = _random_instance(seed + 1000, classes=3, videos=3, frames=8)
        report = video_map(preds, gts, (0.1, 0.3))
        for thr in (0.1, 0.3):
            assert report.values[f"{thr:g}"] == pytest.approx(_reference_video_map(preds, gts, thr), abs=1e-9)


def test_metrics_ignore_record_order():
    preds, gts = _random_instance(7, classes=3, videos=3, frames=8)
    shuffled = [_pred(p.video_id, list(reversed(p.frames))) for p in reversed(preds)]
    for metric in Metrics.ALL:
        assert evaluate(metric, preds, gts).values == evaluate(metric, shuffled, list(reversed(gts))).values


def test_iou_pointing_game_hand_case():
    gts = [_gt('v', [(0, 0, 3, BOX_CELL0)], num_frames=5)]
    frames = [
        _frame('v', 0, BACKGROUND),
        _frame('v', 1, 0, point=(10.0, 10.0)),
        _frame('v', 2, 0, point=(20.0, 20.0)),
        _frame('v', 3, 0, point=(10.0, 10.0)),
        _frame('v', 4, BACKGROUND),
    ]
    report = iou_pointing_game([_pred('v', frames)], gts)
    assert report.values['score'] == 0.5
    assert report.counts == {'tp': 2, 'union': 4}


def test_iou_pointing_game_perfect_and_wrong_points():
    gts = [_gt('v', [(0, 0, 2, BOX_CELL0), (1, 2, 4, BOX_ALL)], num_frames=4)]
    perfect = _pred('v', [_frame('v', 0, 0), _frame('v', 1, 0), _frame('v', 2, 1), _frame('v', 3, 1)])
    assert iou_pointing_game([perfect], gts).values['score'] == 1.0
    outside = _pred('v', [_frame('v', f, 0, point=(90.0, 90.0)) for f in range(2)] + [_frame('v', f, 1) for f in (2, 3)])
    assert iou_pointing_game([outside], gts).per_class['0'] == 0.0


def test_interval_iod_jaccard():
    assert interval_iod_jaccard((10, 20), (15, 25)) == pytest.approx((0.5, 1/3))
    assert interval_iod_jaccard((10, 20), (12, 15)) == (1.0, 0.3)
    assert interval_iod_jaccard((10, 20), (10, 20)) == (1.0, 1.0)
    assert interval_iod_jaccard((10, 20), (30, 40)) == (0.0, 0.0)


def test_iod_is_never_below_jaccard():
    rng = Rng(17)
    a = rng.integers(0, 50, size=(10000, 2))
    b = rng.integers(0, 50, size=(10000, 2))
    for (s0, l0), (s1, l1) in zip(a, b):
        iod, jaccard = interval_iod_jaccard((s0, s0 + l0 + 1), (s1, s1 + l1 + 1))
        assert iod >= jaccard


def test_iod_jaccard_matching():
    result = iod_jaccard(
        [('v', 0, 0, 4), ('v', 0, 12, 20), ('v', 1, 10, 20), ('w', 0, 10, 20)],
        [('v', 0, 10, 20), ('v', 2, 0, 5)],
    )
    matched, unmatched = result['instances']
    assert (matched['iod'], matched['jaccard']) == (1.0, 0.8)
    assert (unmatched['iod'], unmatched['jaccard']) == (0.0, 0.0)
    assert result['iod'] == 0.5 and result['jaccard'] == 0.4


def test_iod_jaccard_ties_go_to_the_earliest_start():
    result = iod_jaccard([('v', 0, 15, 30), ('v', 0, 5, 15)], [('v', 0, 10, 20)])
    assert result['instances'][0]['iod'] == 0.5
    assert result['instances'][0]['jaccard'] == pytest.approx(1/3)


def test_temporal_metrics_counts_missing_frames_as_background():
    gts = [_gt('v', [(0, 1, 3, BOX_CELL0)], num_frames=6), _gt('w', [(1, 0, 2, BOX_CELL0)], num_frames=2)]
    preds = [_pred('v', [_frame('v', f, 0 if f in (1, 2) else BACKGROUND) for f in range(4)])]
    report = temporal_metrics(preds, gts)
    assert report.values['mof'] == pytest.approx(6/8)
    assert report.values['iod'] == 0.5
    assert report.counts['instances'] == 2


def test_report_validation_and_roundtrip(tmp_path):
    with pytest.raises(SchemaError):
        EvalReport('pg', {'accuracy': 1.2})
    reports = [
        EvalReport('pg', {'accuracy': 0.75}, {'0': 0.5}, {'hits': 3, 'misses': 1}, dataset='synth'),
        EvalReport('vmap', {'0.1': 0.5, '0.5': 0.25}, config={'iou_thresholds': [0.1, 0.5]}, dataset='synth'),
    ]
    save_reports(reports, tmp_path/'report.json', run_config={'seed': 7})
    loaded = load_reports(tmp_path/'report.json')
    assert [r.to_dict() for r in loaded] == [r.to_dict() for r in reports]


def test_merge_reports_and_table():
    table = merge_reports([
        EvalReport('pg', {'accuracy': 0.5}, dataset='b'),
        EvalReport('pg', {'accuracy': 0.25}, dataset='a'),
        EvalReport('pg', {'accuracy': 0.75}, dataset='b'),
    ])
    assert table == {('a', 'pg'): {'accuracy': 0.25}, ('b', 'pg'): {'accuracy': 0.75}}
    lines = format_table(table).splitlines()
    assert lines[0].split() == ['dataset', 'metric', 'value', 'score']
    assert lines[1].split() == ['a', 'pg', 'accuracy', '0.2500']


def test_evaluate_sets_dataset_and_rejects_unknown_metrics():
    gts = [_gt('v', [(0, 0, 1, BOX_CELL0)], num_frames=1)]
    preds = [_pred('v', [_frame('v', 0, 0)])]
    assert evaluate(Metrics.POINTING_GAME, preds, gts, dataset='synth').dataset == 'synth'
    with pytest.raises(ConfigError):
        evaluate('recall@5', preds, gts)


def test_restrict_keeps_selected_segments():
    gts = [_gt('v', [(0, 0, 2, BOX_CELL0), (1, 3, 5, BOX_ALL)])]
    preds = [_pred('v', [_frame('v', f, label) for f, label in enumerate([0, 0, BACKGROUND, 1, 1, BACKGROUND])])]
    kept_preds, kept_gts = restrict(preds, gts, {('v', 1)})
    assert [s.class_id for s in kept_gts[0].segments] == [1]
    assert [f.label for f in kept_preds[0].frames] == [BACKGROUND]*3 + [1, 1, BACKGROUND]
    assert not kept_preds[0].frames[0].mask.any()


def test_threshold_sweep_recomputes_masks():
    gts = [_gt('v', [(0, 0, 2, BOX_CELL0)], num_frames=2)]
    frames = [
        FrameRecord('v', f, 0, 0.9, [1.0, 0.4, 0.2, 0.0], (25.0, 25.0), [True]*4)
        for f in range(2)
    ]
    reports = threshold_sweep([_pred('v', frames)], gts, [0.0, 0.5], iou_thresholds=(0.5,))
    assert reports[0.0].values['0.5'] == 0.0
    assert reports[0.5].values['0.5'] == 1.0
    assert reports[0.5].config['tau'] == 0.5
