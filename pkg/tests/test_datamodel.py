import json

import numpy as np
import pytest

from stground import BACKGROUND
from stground.datamodel import (
    ClipFeatures,
    FrameRecord,
    GtSegment,
    LabelBank,
    LabelClass,
    SpatioTemporalPrediction,
    SynthConfig,
    VideoGt,
    argmax_point,
    cell_center,
    cell_index,
    cells_box,
    grid_side,
    load_clip_features,
    load_clips,
    load_gt,
    load_predictions,
    point_in_box,
    rasterize_box,
    save_clip_features,
    save_clips,
    save_gt,
    save_predictions,
    synth_generate,
    upsample_bilinear,
)
from stground.exceptions import ConfigError, DimMismatchError, ParseError, SchemaError


def test_grid_side():
    assert grid_side(49) == 7
    with pytest.raises(DimMismatchError):
        grid_side(50)


def test_rasterize_full_frame_box_covers_every_cell():
    assert rasterize_box([0, 0, 224, 224], 49, 224, 224).all()
    assert not rasterize_box([0, 0, 10, 10], 49, 224, 224).any()


def test_cell_index_is_row_major():
    assert [cell_index(r, c, 7) for r, c in [(0, 0), (0, 6), (1, 0), (6, 6)]] == [0, 6, 7, 48]
    assert cell_center(cell_index(2, 3, 7), 7, 224, 224) == (112.0, 80.0)


def test_synth_planted_cells_form_a_block(small_dataset, small_synth_cfg):
    side = grid_side(small_synth_cfg.N)
    for gt in small_dataset.clip_gt:
        cells = np.flatnonzero(rasterize_box(gt.segments[0].boxes[0], small_synth_cfg.N, 224, 224))
        rows, cols = np.divmod(cells, side)
        assert len(cells) == small_synth_cfg.planted_cells
        assert rows.max() - rows.min() == cols.max() - cols.min() == 1


def test_cells_box_rasterizes_back_to_its_cells():
    cells = [8, 9, 15, 16]
    box = cells_box(cells, 7, 224, 224)
    assert sorted(np.flatnonzero(rasterize_box(box, 49, 224, 224))) == cells


def test_point_in_box_is_closed():
    box = [10, 10, 20, 20]
    assert point_in_box((10, 15), box)
    assert point_in_box((20, 20), box)
    assert not point_in_box((20.01, 15), box)


def test_upsample_keeps_constant_maps_constant():
    up = upsample_bilinear(np.full(16, 0.25), 32, 20)
    assert up.shape == (20, 32)
    assert np.allclose(up, 0.25)


def test_argmax_point_lands_in_the_hot_cell():
    heatmap = np.zeros(4)
    heatmap[3] = 1.0
    point = argmax_point(heatmap, 100, 100)
    assert point_in_box(point, cells_box([3], 2, 100, 100))


def test_argmax_point_ties_go_to_top_left():
    assert argmax_point(np.ones(9), 30, 30) == (0.5, 0.5)


def test_clip_roundtrip(tmp_path, small_dataset):
    clip = small_dataset.clips[0]
    save_clip_features(clip, tmp_path/'clip.json', run_config={'seed': 7})
    loaded = load_clip_features(tmp_path/'clip.json')
    assert loaded.clip_id == clip.clip_id
    assert np.array_equal(loaded.grid, clip.grid)
    assert np.array_equal(loaded.frame_global, clip.frame_global)
    assert [w.text for w in loaded.words] == [w.text for w in clip.words]
    assert np.array_equal(loaded.word_matrix, clip.word_matrix)


def test_clips_jsonl_roundtrip(tmp_path, small_dataset):
    save_clips(small_dataset.clips[:3], tmp_path/'clips.jsonl')
    header = json.loads((tmp_path/'clips.jsonl').read_text().splitlines()[0])
    assert header['kind'] == 'header'
    loaded = load_clips(tmp_path/'clips.jsonl')
    assert [c.clip_id for c in loaded] == [c.clip_id for c in small_dataset.clips[:3]]


def test_grid_length_mismatch_is_a_schema_error(small_dataset):
    d = small_dataset.clips[0].to_dict()
    d['grid'] = d['grid'][:-1]
    with pytest.raises(SchemaError):
        ClipFeatures.from_dict(d, source='clip.json')


def test_missing_field_names_file_and_field(tmp_path, small_dataset):
    d = small_dataset.clips[0].to_dict()
    del d['sentence']
    path = tmp_path/'clips.jsonl'
    path.write_text(json.dumps({'kind': 'header', 'format_version': 1}) + '\n' + json.dumps(d) + '\n')
    with pytest.raises(ParseError) as e:
        load_clips(path)
    assert e.value.field == 'sentence'
    assert e.value.line == 2


def test_files_must_carry_a_format_version(tmp_path, small_dataset):
    clips = tmp_path/'clips.jsonl'
    clips.write_text(json.dumps(small_dataset.clips[0].to_dict()) + '\n')
    with pytest.raises(ParseError) as e:
        load_clips(clips)
    assert (e.value.field, e.value.line) == ('format_version', 1)

    empty = tmp_path/'gt.jsonl'
    empty.write_text('')
    with pytest.raises(ParseError) as e:
        load_gt(empty)
    assert e.value.field == 'format_version'

    bank = tmp_path/'bank.json'
    bank.write_text(json.dumps(small_dataset.bank.to_dict()))
    with pytest.raises(ParseError) as e:
        LabelBank.load(bank)
    assert e.value.field == 'format_version'


def test_unknown_format_version_is_rejected(tmp_path):
    path = tmp_path/'gt.jsonl'
    path.write_text(json.dumps({'kind': 'header', 'format_version': 99}) + '\n')
    with pytest.raises(SchemaError):
        load_gt(path)


def test_invalid_json_line_is_a_parse_error(tmp_path):
    path = tmp_path/'gt.jsonl'
    path.write_text('{"kind": "header", "format_version": 1}\n{broken\n')
    with pytest.raises(ParseError) as e:
        load_gt(path)
    assert e.value.line == 2


def test_label_bank_requires_dense_ids():
    v = np.ones(3)
    with pytest.raises(SchemaError):
        LabelBank([LabelClass(0, 'a', [v], v), LabelClass(2, 'b', [v], v)])
    with pytest.raises(SchemaError):
        LabelBank([LabelClass(0, 'a', [v], v), LabelClass(1, 'a', [v], v)])


def test_label_bank_vocabulary_positions():
    v = np.ones(3)
    bank = LabelBank([LabelClass(0, 'a', [v, v], v), LabelClass(1, 'b', [v], v)])
    words, positions = bank.vocabulary()
    assert words.shape == (3, 3)
    assert positions == {0: [0, 1], 1: [2]}


def _gt(segments, num_frames=10):
    return VideoGt('v', 100, 100, num_frames, [GtSegment(c, s, e, [[0, 0, 50, 50]]*(e - s)) for c, s, e in segments])


def test_transcript_marks_background_gaps():
    assert _gt([(0, 2, 4), (1, 6, 8)]).ordered_transcript == [BACKGROUND, 0, BACKGROUND, 1, BACKGROUND]
    assert _gt([(0, 0, 3), (1, 3, 10)]).ordered_transcript == [0, 1]


def test_frame_labels_and_tube():
    gt = _gt([(1, 2, 4)], num_frames=5)
    assert gt.frame_labels() == [BACKGROUND, BACKGROUND, 1, 1, BACKGROUND]
    tube = gt.tube(gt.segments[0], 4)
    assert tube == {(2, 0), (3, 0)}


def test_gt_rejects_boxes_outside_the_frame():
    with pytest.raises(SchemaError):
        VideoGt('v', 100, 100, 5, [GtSegment(0, 0, 1, [[0, 0, 150, 50]])])


def test_gt_roundtrip(tmp_path, small_dataset):
    save_gt(small_dataset.gt, tmp_path/'gt.jsonl', run_config={'seed': 7})
    loaded = load_gt(tmp_path/'gt.jsonl')
    assert [g.to_dict() for g in loaded] == [g.to_dict() for g in small_dataset.gt]


def _record(frame, label, score=0.5, n=4):
    heatmap = np.linspace(0, 1, n)
    return FrameRecord('v', frame, label, score, heatmap, (1.0, 1.0) if label != BACKGROUND else None, heatmap >= 0.5)


def test_prediction_segments_follow_labels():
    pred = SpatioTemporalPrediction('v', [_record(i, l, score=i/10) for i, l in enumerate([0, 0, BACKGROUND, 1])])
    assert [(s.class_id, s.start, s.end) for s in pred.segments] == [(0, 0, 2), (1, 3, 4)]
    assert pred.segments[0].confidence == pytest.approx(0.05)
    assert pred.voxel_count == 8


def test_predictions_roundtrip(tmp_path):
    pred = SpatioTemporalPrediction('v', [_record(i, l) for i, l in enumerate([0, 0, BACKGROUND, 1])])
    save_predictions([pred], tmp_path/'pred.jsonl')
    (loaded,) = load_predictions(tmp_path/'pred.jsonl')
    assert [f.to_dict() for f in loaded.frames] == [f.to_dict() for f in pred.frames]


def test_frame_record_rejects_out_of_range_heatmap():
    with pytest.raises(SchemaError):
        FrameRecord('v', 0, 0, 0.5, [0.0, 1.5, 0.0, 0.0], None, [False]*4)


def test_synth_is_deterministic(small_synth_cfg):
    a, b = synth_generate(small_synth_cfg), synth_generate(small_synth_cfg)
    for x, y in zip(a.clips + a.videos, b.clips + b.videos):
        assert np.array_equal(x.grid, y.grid)
        assert np.array_equal(x.word_matrix, y.word_matrix)
    assert [g.to_dict() for g in a.gt] == [g.to_dict() for g in b.gt]


def test_synth_values_are_float32_exact(small_dataset):
    grid = small_dataset.clips[0].grid
    assert np.array_equal(grid, grid.astype(np.float32).astype(np.float64))


def test_synth_plants_the_class_in_its_segment(small_dataset):
    for clip, gt in zip(small_dataset.clips, small_dataset.clip_gt):
        (segment,) = gt.segments
        word = small_dataset.bank[segment.class_id].words[0]
        sims = clip.frame_global @ word
        planted = np.array([u in segment.frames for u in range(clip.num_frames)])
        assert sims[planted].mean() > sims[~planted].mean()


def test_synth_videos_leave_background_between_segments(small_dataset):
    for gt in small_dataset.gt:
        assert len(gt.segments) == 2
        assert gt.segments[0].end_frame < gt.segments[1].start_frame


def test_synth_config_validation():
    with pytest.raises(ConfigError):
        SynthConfig(N=50)
    with pytest.raises(ConfigError):
        SynthConfig(T=20, U=16)
    with pytest.raises(ConfigError):
        SynthConfig.from_dict({'bogus': 1})
