import math

import numpy as np
import pytest

from stground import Optimizers, SelectionStrategies
from stground.exceptions import ConfigError, EmptyQueryError, SchemaError
from stground.groundnet import (
    SGD,
    Adam,
    AttentionConfig,
    AttentionTrace,
    ModelParams,
    TrainConfig,
    Trainer,
    cross_attention,
    load_params,
    local_forward,
    make_optimizer,
    nce_loss,
    nce_loss_and_grads,
    project_globals,
    rollout_heatmap,
    save_params,
    self_attention,
    total_loss,
    total_loss_and_grads,
    train,
)
from stground.numcore import GradBundle, Rng, finite_diff_check, normalize_rows


STACKS = [['cross'], ['cross', 'self', 'cross'], ['self', 'cross']]
# every batch size, projection width and stack, twenty seeds
GRADIENT_CONFIGS = [(i, (2, 4)[i % 2], (8, 16)[i//2 % 2], STACKS[i % 3]) for i in range(20)]


def _unit(seed, b, d):
    return normalize_rows(Rng(seed).normal((b, d)))


def test_identity_projection_keeps_unit_inputs():
    x = _unit(0, 3, 5)
    assert np.allclose(project_globals(x, np.eye(5)), x)


def test_cross_attention_single_key():
    kv = np.array([[0.3, -0.2, 0.9]])
    contextual, a = cross_attention(_unit(1, 4, 3), kv)
    assert np.allclose(a, 1.0)
    assert np.allclose(contextual, np.repeat(kv, 4, axis=0))


def test_cross_attention_identical_keys():
    w = np.array([0.5, 0.5, -0.1])
    contextual, _ = cross_attention(_unit(2, 3, 3), np.stack([w]*5))
    assert np.allclose(contextual, w)


def test_cross_attention_hand_example():
    kv1 = np.array([math.log(2), math.sqrt(1 - math.log(2)**2)])
    kv2 = np.array([0.0, 1.0])
    contextual, a = cross_attention([[1.0, 0.0]], np.stack([kv1, kv2]))
    assert a[0] == pytest.approx([2/3, 1/3], abs=1e-12)
    assert contextual[0] == pytest.approx((2*kv1 + kv2)/3, abs=1e-12)


def test_self_attention_single_token_and_equal_tokens():
    v = np.array([[0.1, 0.7, -0.3]])
    assert np.allclose(self_attention(v)[0], v)
    out, _ = self_attention(np.repeat(v, 4, axis=0))
    assert np.allclose(out, v)


def test_self_attention_is_permutation_equivariant():
    x = _unit(3, 6, 4)
    perm = [3, 0, 5, 1, 4, 2]
    assert np.allclose(self_attention(x)[0][perm], self_attention(x[perm])[0], atol=1e-12)


def test_nce_single_pair_is_zero():
    assert nce_loss((_unit(4, 1, 6), _unit(5, 1, 6)), margin=0.3) == pytest.approx(0.0, abs=1e-15)


def test_nce_hand_example():
    assert nce_loss((np.eye(2), np.eye(2)), margin=0.0) == pytest.approx(2*math.log(1 + math.exp(-1)), abs=1e-12)
    assert nce_loss([(np.eye(2)[0], np.eye(2)[0]), (np.eye(2)[1], np.eye(2)[1])], margin=0.0) == pytest.approx(0.62652, abs=1e-5)


def test_nce_properties():
    x, y = _unit(6, 5, 8), _unit(7, 5, 8)
    base = nce_loss((x, y), margin=0.1)
    assert base > 0
    assert nce_loss((x, y), margin=0.2) > base
    perm = [2, 4, 0, 1, 3]
    assert nce_loss((x[perm], y[perm]), margin=0.1) == pytest.approx(base, abs=1e-12)
    doubled = nce_loss((np.vstack([x, x]), np.vstack([y, y])), margin=0.1)
    assert doubled >= base


def test_nce_gradients_match_central_differences():
    def loss_fn(p):
        loss, dx, dy = nce_loss_and_grads(p['x'], p['y'], margin=0.1)
        return GradBundle(loss, {'x': dx, 'y': dy})

    assert finite_diff_check(loss_fn, {'x': _unit(8, 4, 16), 'y': _unit(9, 4, 16)}) < 1e-4


@pytest.mark.parametrize('seed,B,proj_dim,stack', GRADIENT_CONFIGS)
def test_total_loss_gradients_match_central_differences(seed, B, proj_dim, stack, random_clip):
    batch = [(random_clip(seed=10*seed + b, U=3, N=4, dim=4, K=3, clip_id=f"c{b}"), [0, 2]) for b in range(B)]
    params = ModelParams.random(4, proj_dim, seed=seed)
    cfg, attn = TrainConfig(margin=0.1), AttentionConfig(stack=stack)

    def loss_fn(p):
        return total_loss_and_grads(batch, ModelParams.from_matrices(p), cfg, attn)

    assert finite_diff_check(loss_fn, params.matrices, step=1e-5) < 1e-4


def test_disabled_losses_give_zero(random_clip):
    batch = [(random_clip(seed=s, clip_id=f"c{s}"), [0, 1]) for s in range(2)]
    params = ModelParams.random(6, 4)
    bundle = total_loss_and_grads(batch, params, TrainConfig(use_global=False, use_local=False))
    assert bundle.value == 0.0
    assert all(not g.any() for g in bundle.grads.values())


def test_single_branch_only_touches_its_projections(random_clip):
    batch = [(random_clip(seed=s, clip_id=f"c{s}"), [0, 1]) for s in range(2)]
    bundle = total_loss_and_grads(batch, ModelParams.random(6, 4), TrainConfig(use_local=False))
    assert bundle.parts['local'] == 0.0
    assert not bundle.grads['W_f_local'].any() and not bundle.grads['W_g_local'].any()
    assert bundle.grads['W_f'].any()


def test_loss_ignores_projection_scale(random_clip):
    batch = [(random_clip(seed=s, clip_id=f"c{s}"), [0, 1, 3]) for s in range(3)]
    cfg = TrainConfig()
    for seed in range(10):
        params = ModelParams.random(6, 5, seed=seed)
        a = total_loss(batch, params, cfg)
        b = total_loss(batch, params.scaled(3.7), cfg)
        assert b['total'] == pytest.approx(a['total'], abs=1e-10)


def test_local_forward_with_a_single_word(make_clip):
    rng = Rng(11)
    word = rng.normal(6)
    clip = make_clip(rng.normal((2, 4, 6)), rng.normal((2, 6)), [word], rng.normal(6))
    out = local_forward(clip, [0, 1], ModelParams.identity(6), AttentionConfig(stack=['cross']))
    assert np.allclose(out['V_bar'], word/np.linalg.norm(word))
    (layer,) = out['trace'].layers
    assert layer['A_vs'].shape == (8, 1)
    assert np.allclose(layer['A_vs'], 1.0)


def test_local_forward_ignores_cell_order(random_clip, make_clip):
    clip = random_clip(seed=12, U=2, N=9, dim=6)
    perm = [4, 2, 8, 0, 1, 7, 3, 6, 5]
    shuffled = make_clip(clip.grid[:, perm], clip.frame_global, clip.word_matrix, clip.sentence)
    params = ModelParams.random(6, 5)
    assert np.allclose(local_forward(clip, [0, 1], params)['V_bar'], local_forward(shuffled, [0, 1], params)['V_bar'], atol=1e-12)


@pytest.mark.parametrize('stack', STACKS)
def test_trace_matrices_are_row_stochastic(stack, random_clip):
    trace = local_forward(random_clip(seed=13), [0, 1, 2], ModelParams.random(6, 5), AttentionConfig(stack=stack))['trace']
    assert len(trace.layers) == len(stack)
    for _, a in trace.matrices():
        assert np.allclose(a.sum(axis=1), 1.0, atol=1e-9)


def test_local_branch_matches_class(clean_dataset):
    params = ModelParams.identity(clean_dataset.clips[0].dim)
    attn = AttentionConfig(stack=['cross'])
    for clip, gt in zip(clean_dataset.clips, clean_dataset.clip_gt):
        frames = list(gt.segments[0].frames)
        v_bar = local_forward(clip, frames, params, attn)['V_bar']
        own = clean_dataset.bank[gt.segments[0].class_id].words[0]
        others = [c.words[0] for c in clean_dataset.bank.classes if c.class_id != gt.segments[0].class_id]
        assert all(np.dot(v_bar, own) > np.dot(v_bar, o) for o in others)


def _trace(a_vs, a_self=None):
    trace = AttentionTrace(1, a_vs.shape[0])
    if a_self is not None:
        trace.add_self(a_self, np.eye(a_vs.shape[1]))
    trace.add_cross(a_vs, a_vs.T)
    return trace


def test_rollout_with_identity_self_attention_follows_cross_mass():
    a_vs = np.array([[0.7, 0.3], [0.2, 0.8], [0.5, 0.5], [0.9, 0.1]])
    heatmap = rollout_heatmap(_trace(a_vs, np.eye(4)), [0])
    assert heatmap.shape == (1, 4)
    assert heatmap[0] == pytest.approx([5/7, 0.0, 3/7, 1.0])


def test_rollout_of_every_word_is_flat():
    a_vs = np.array([[0.7, 0.3], [0.2, 0.8], [0.5, 0.5], [0.9, 0.1]])
    assert not rollout_heatmap(_trace(a_vs), [0, 1]).any()


def test_rollout_needs_a_query():
    with pytest.raises(EmptyQueryError):
        rollout_heatmap(_trace(np.full((4, 2), 0.5)), [])


def test_rollout_finds_planted_cells(clean_dataset):
    params = ModelParams.identity(clean_dataset.clips[0].dim)
    attn = AttentionConfig(stack=['cross'])
    hits = 0
    for clip, gt in zip(clean_dataset.clips, clean_dataset.clip_gt):
        frames = list(gt.segments[0].frames)
        carrier = next(k for k, w in enumerate(clip.words) if w.text.startswith('action_'))
        trace = local_forward(clip, frames, params, attn)['trace']
        heatmap = rollout_heatmap(trace, [carrier])
        assert heatmap.min() >= 0.0 and heatmap.max() == pytest.approx(1.0)
        planted = np.flatnonzero(np.abs(clip.grid[frames[0]] @ clean_dataset.bank[gt.segments[0].class_id].words[0] - 1) < 1e-5)
        hits += int(np.argmax(heatmap) % clip.num_cells in planted)
    assert hits == len(clean_dataset.clips)


def test_params_roundtrip(tmp_path):
    params = ModelParams.random(6, 4, seed=5)
    save_params(params, tmp_path/'params.json', run_config={'seed': 5})
    loaded = load_params(tmp_path/'params.json')
    for name in ModelParams.NAMES:
        assert np.array_equal(getattr(loaded, name), getattr(params, name))


def test_params_reject_mismatched_shapes():
    with pytest.raises(SchemaError):
        ModelParams(np.eye(3), np.eye(3), np.eye(3), np.ones((3, 2)))


def test_optimizers():
    params, grads = {'w': np.array([1.0, -1.0])}, {'w': np.array([0.5, -2.0])}
    assert np.allclose(SGD(0.1).step(params, grads)['w'], [0.95, -0.8])
    assert np.allclose(Adam(0.1).step(params, grads)['w'], [0.9, -0.9], atol=1e-6)
    assert isinstance(make_optimizer(Optimizers.ADAM, 0.1), Adam)
    with pytest.raises(ConfigError):
        make_optimizer('momentum', 0.1)


@pytest.mark.parametrize('stack', [['self'], ['cross', 'self'], ['cross', 'dense']])
def test_attention_config_needs_a_final_cross_layer(stack):
    with pytest.raises(ConfigError):
        AttentionConfig(stack=stack)


def test_train_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(batch_size=0)
    with pytest.raises(ConfigError):
        TrainConfig(optimizer='rmsprop')
    TrainConfig(learning_rate=0.0)


def _fit(dataset, **kwargs):
    cfg = TrainConfig(**{'batch_size': 4, 'epochs': 3, 'learning_rate': 1e-2, 'T': 4, 'proj_dim': 16, **kwargs})
    params = ModelParams.random(dataset.clips[0].dim, cfg.proj_dim, seed=cfg.seed)
    return params, train(dataset.clips, dataset.bank, params, cfg, AttentionConfig(stack=['cross', 'self', 'cross']))


def test_training_with_zero_learning_rate_changes_nothing(small_dataset):
    params, result = _fit(small_dataset, learning_rate=0.0)
    for name in ModelParams.NAMES:
        assert np.array_equal(getattr(result.params, name), getattr(params, name))
    totals = [entry['loss_total'] for entry in result.log]
    assert totals == [totals[0]]*len(totals)


def test_training_is_deterministic(small_dataset):
    _, a = _fit(small_dataset)
    _, b = _fit(small_dataset)
    assert a.log == b.log
    for name in ModelParams.NAMES:
        assert np.array_equal(getattr(a.params, name), getattr(b.params, name))
    assert a.selections == b.selections


def test_training_reduces_the_loss(small_dataset):
    _, result = _fit(small_dataset, epochs=5)
    assert [entry['epoch'] for entry in result.log] == list(range(6))
    assert result.log[-1]['loss_total'] < result.log[0]['loss_total']


def test_trainer_hooks(small_dataset):
    trainer = Trainer(TrainConfig(batch_size=5, epochs=2, T=4, proj_dim=8), strategy=SelectionStrategies.GLOBAL)
    seen = {'epochs': [], 'batches': [], 'errors': []}

    @trainer.on_epoch_end
    def record_epoch(entry, params):
        seen['epochs'].append(entry['epoch'])

    @trainer.on_batch_end
    def record_batch(epoch, b, bundle):
        seen['batches'].append((epoch, b))
        if b == 0:
            raise RuntimeError('boom')

    @trainer.on_handler_error
    def record_errors(errors):
        seen['errors'].append(len(errors))

    trainer.fit(small_dataset.clips, ModelParams.random(small_dataset.clips[0].dim, 8))
    assert seen['epochs'] == [1, 2]
    assert seen['batches'] == [(e, b) for e in (1, 2) for b in range(3)]
    assert seen['errors'] == [1, 1]
