from ._report import EvalReport, format_table, load_reports, merge_reports, save_reports
from ._ap import average_precision, interval_iod_jaccard, mask_iou, voxel_iou
from ._spatial import iou_pointing_game, pointing_game, spatial_map
from ._video import DEFAULT_THRESHOLDS, threshold_sweep, video_map
from ._temporal import frame_accuracy, iod_jaccard, temporal_metrics
from ._evaluate import evaluate, restrict
