from os import getenv
from dotenv import load_dotenv

from stground import (
    AttentionConfig,
    InferConfig,
    ModelParams,
    SynthConfig,
    TrainConfig,
    Trainer,
    evaluate,
    synth_generate,
)
from stground.infer import ground_videos
from stground.logging import setup_logger, WARNING, INFO, DEBUG


# uses the `logging` module
# alternatively it can be setup manually
setup_logger(INFO)

# python-dotenv is optional, a `.env` file can hold the thread count
load_dotenv(verbose=True)
threads = int(getenv('STGROUND_THREADS') or 1)

dataset = synth_generate(SynthConfig(classes=4, train_clips=60, videos=8, seed=7))
params = ModelParams.random(dataset.bank.dim, proj_dim=32, seed=7)

attention = AttentionConfig()
trainer = Trainer(TrainConfig(batch_size=16, learning_rate=1e-3, epochs=5, proj_dim=32), attention)


@trainer.on_epoch_end
def on_epoch_end(entry, params):
    print(f"epoch {entry['epoch']}: loss {entry['loss_total']:.4f}")


# multiple handlers can be used for the same event
@trainer.on_epoch_end
def keep_best(entry, params):
    ...


@trainer.on_batch_end
def on_batch_end(epoch, batch, bundle):
    if batch == 0:
        print(f"first batch of epoch {epoch}: {bundle}")


@trainer.on_handler_error
def on_handler_error(exceptions):
    for e in exceptions:
        print(e)


result = trainer.fit(dataset.clips, params)

preds = ground_videos(
    dataset.videos, dataset.bank, result.params, attention, InferConfig(),
    threads, {g.video_id: (g.width, g.height) for g in dataset.gt},
)
for metric in ('pg', 'vmap', 'temporal'):
    print(evaluate(metric, preds, dataset.gt))
