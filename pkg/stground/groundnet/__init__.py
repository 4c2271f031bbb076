from ._params import ModelParams, load_params, save_params
from ._config import AttentionConfig, TrainConfig
from ._project import frame_globals, project_globals, project_tokens, sentence_global
from ._attention import AttentionTrace, cross_attention, self_attention
from ._forward import local_forward
from ._loss import nce_loss, nce_loss_and_grads, total_loss, total_loss_and_grads
from ._rollout import minmax_normalize, rollout_heatmap, rollout_relevance
from ._optim import SGD, Adam, make_optimizer
from ._train import Trainer, TrainResult, train
