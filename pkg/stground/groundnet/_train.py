import logging

from .. import otselect
from .._constants import SelectionStrategies
from .._handler import EventHandler, TrainEvents
from ..numcore import Rng
from ._config import AttentionConfig, TrainConfig
from ._loss import total_loss, total_loss_and_grads
from ._optim import make_optimizer
from ._params import ModelParams


class TrainResult:
    def __init__(self, params, log, selections):
        self.params = params
        self.log = log
        self.selections = selections

    def __repr__(self):
        return f"TrainResult(epochs={len(self.log) - 1}, final_loss={self.log[-1]['loss_total']:.4f})"


class Trainer:
    """
    Mini-batch training of the four projections.

    The loss log holds an epoch-0 entry evaluated before any update, then
    one entry per epoch evaluated after it, always over the dataset in
    clip-id order. Shuffling draws from `Rng(seed).child(epoch)`.
    """

    def __init__(self, train_cfg=None, attn_cfg=None, strategy=SelectionStrategies.SINKHORN, sinkhorn_cfg=None):
        self.train_cfg = train_cfg or TrainConfig()
        self.attn_cfg = attn_cfg or AttentionConfig()
        self.strategy = strategy
        self.sinkhorn_cfg = sinkhorn_cfg or otselect.SinkhornConfig()
        self._handler = EventHandler()

    def on_epoch_end(self, f):
        """Called with the epoch's log entry and the current params."""
        return self._handler.on(TrainEvents.EPOCH_END, f)

    def on_batch_end(self, f):
        """Called with `(epoch, batch_index, GradBundle)`."""
        return self._handler.on(TrainEvents.BATCH_END, f)

    def on_handler_error(self, f):
        return self._handler.on(TrainEvents.HANDLER_ERROR, f)

    def _select(self, clips, params):
        return {
            clip.clip_id: otselect.select_frames(
                clip, self.strategy, self.train_cfg.T, params, self.sinkhorn_cfg, self.attn_cfg
            )
            for clip in clips
        }

    def _evaluate(self, epoch, clips, selections, params):
        cfg = self.train_cfg
        totals = {'global': 0.0, 'local': 0.0, 'total': 0.0}
        batches = 0
        for start in range(0, len(clips), cfg.batch_size):
            chunk = clips[start:start + cfg.batch_size]
            parts = total_loss([(c, selections[c.clip_id]) for c in chunk], params, cfg, self.attn_cfg)
            for key in totals:
                totals[key] += parts[key]
            batches += 1
        entry = {'epoch': epoch, **{f"loss_{k}": v/max(1, batches) for k, v in totals.items()}}
        logging.info(f"epoch {epoch}: loss {entry['loss_total']:.6f} (global {entry['loss_global']:.6f}, local {entry['loss_local']:.6f})")
        return entry

    def fit(self, clips, params):
        if not clips:
            raise ValueError('training needs at least one clip')
        cfg = self.train_cfg
        for clip in clips:
            params.check_dim(clip.dim)
        clips = sorted(clips, key=lambda c: c.clip_id)
        optimizer = make_optimizer(cfg.optimizer, cfg.learning_rate)
        rng = Rng(cfg.seed)

        selections = self._select(clips, params)
        log = [self._evaluate(0, clips, selections, params)]
        for epoch in range(1, cfg.epochs + 1):
            order = rng.child(epoch).permutation(len(clips))
            for b, start in enumerate(range(0, len(order), cfg.batch_size)):
                batch = [(clips[i], selections[clips[i].clip_id]) for i in order[start:start + cfg.batch_size]]
                bundle = total_loss_and_grads(batch, params, cfg, self.attn_cfg)
                params = ModelParams.from_matrices(optimizer.step(params.matrices, bundle.grads))
                self._handler.handle_event(TrainEvents.BATCH_END, epoch, b, bundle)
            if cfg.reselect_every_epoch:
                selections = self._select(clips, params)
            entry = self._evaluate(epoch, clips, selections, params)
            log.append(entry)
            self._handler.handle_event(TrainEvents.EPOCH_END, entry, params)
            self._handler.flush_errors()
        return TrainResult(params, log, selections)


def train(dataset, bank, params, train_cfg=None, attn_cfg=None, strategy=SelectionStrategies.SINKHORN, sinkhorn_cfg=None):
    """Functional entry point; `bank` only has to agree with the clips' feature dim."""
    if bank is not None:
        params.check_dim(bank.dim)
    return Trainer(train_cfg, attn_cfg, strategy, sinkhorn_cfg).fit(list(dataset), params)
