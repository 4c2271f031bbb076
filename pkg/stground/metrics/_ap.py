import numpy as np


def average_precision(hits, num_gt):
    """
    All-point AP of a ranked detection list: the exact area under the
    precision envelope, stepping at each true positive.
    """

    if num_gt <= 0:
        return 0.0
    hits = np.asarray(hits, dtype=bool)
    if not hits.any():
        return 0.0
    tp = np.cumsum(hits)
    precision = tp/np.arange(1, len(hits) + 1)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    return float(np.sum(envelope[hits])/num_gt)


def mask_iou(a, b):
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return np.count_nonzero(a & b)/union


def voxel_iou(a, b):
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b)/union


def interval_iod_jaccard(gt, det):
    """`(IoD, Jaccard)` of half-open frame intervals `(start, end)`."""
    inter = max(0, min(gt[1], det[1]) - max(gt[0], det[0]))
    det_len = det[1] - det[0]
    union = (gt[1] - gt[0]) + det_len - inter
    iod = inter/det_len if det_len > 0 else 0.0
    jaccard = inter/union if union > 0 else 0.0
    return iod, jaccard
