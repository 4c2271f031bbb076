from ._similarity import projected_frames, sentence_similarity, similarity_matrix
from ._sinkhorn import SinkhornConfig, SinkhornResult, marginal_violation, sinkhorn
from ._select import central_block, frame_scores, planted_recall, select_frames, top_frames
