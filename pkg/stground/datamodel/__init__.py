from ._records import Record, load_jsonl, save_jsonl
from ._grid import (
    argmax_point,
    box_area,
    cell_center,
    cell_centers,
    cell_index,
    cells_box,
    grid_side,
    point_in_box,
    rasterize_box,
    upsample_bilinear,
)
from ._clip import ClipFeatures, Word, load_clip_features, load_clips, save_clip_features, save_clips
from ._bank import LabelBank, LabelClass
from ._gt import GtSegment, VideoGt, load_gt, save_gt
from ._prediction import (
    FrameRecord,
    PredictedSegment,
    SpatioTemporalPrediction,
    load_predictions,
    save_predictions,
)
from ._synth import SynthConfig, SynthDataset, synth_generate
