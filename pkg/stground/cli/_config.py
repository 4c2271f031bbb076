import json
import logging
from os import getenv
from pathlib import Path

from dotenv import load_dotenv

from ..benchtools import BenchConfig
from ..datamodel import SynthConfig
from ..exceptions import ConfigError, ParseError
from ..groundnet import AttentionConfig, TrainConfig
from ..infer import InferConfig
from ..otselect import SinkhornConfig


DEFAULT_SEED = 7
THREADS_ENV = 'STGROUND_THREADS'
LOG_LEVEL_ENV = 'STGROUND_LOG_LEVEL'

SECTIONS = {
    'synth': SynthConfig,
    'sinkhorn': SinkhornConfig,
    'attention': AttentionConfig,
    'train': TrainConfig,
    'infer': InferConfig,
    'bench': BenchConfig,
}
SEEDED = ('synth', 'train')
NOT_ECHOED = {'command', 'annot_command', 'func', 'output', 'config', 'seed', 'threads', 'log_level', 'log_file', 'reports'}


def load_env():
    load_dotenv(dotenv_path=Path.cwd()/'.env')


def resolve_threads(flag):
    if flag is not None:
        threads = flag
    else:
        value = getenv(THREADS_ENV)
        try:
            threads = int(value) if value else 1
        except ValueError:
            raise ConfigError(THREADS_ENV, value, 'an integer')
    if threads < 1:
        raise ConfigError('threads', threads, '>= 1')
    return threads


def read_config_file(path):
    if path is None:
        return {}
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf8'))
    except json.JSONDecodeError as e:
        raise ParseError(str(path), line=e.lineno, reason=e.msg)
    if not isinstance(data, dict):
        raise ParseError(str(path), reason='expected a JSON object of config sections')
    unknown = set(data) - set(SECTIONS) - {'seed'}
    if unknown:
        raise ConfigError('config', sorted(unknown), f"sections among {sorted(SECTIONS)}")
    return data


class RunConfig:
    """
    Everything a subcommand runs with. Built from module defaults, then the
    `--config` file sections, then explicit flags; `to_dict` is the echo
    stored in every output file.
    """

    def __init__(self, subcommand, inputs, seed=DEFAULT_SEED, threads=1, output=None, options=None, **sections):
        self.subcommand = subcommand
        self.inputs = inputs
        self.options = options or {}
        self.seed = seed
        self.threads = threads
        self.output = output
        for name, cls in SECTIONS.items():
            setattr(self, name, sections.get(name) or cls())

    def __repr__(self):
        return f"RunConfig(subcommand='{self.subcommand}', seed={self.seed})"

    @classmethod
    def from_args(cls, args):
        flags = vars(args)
        file_config = read_config_file(flags.get('config'))
        seed = flags.get('seed')
        if seed is None:
            seed = file_config.get('seed', DEFAULT_SEED)

        sections = {}
        for name, section_cls in SECTIONS.items():
            values = {'seed': seed} if name in SEEDED else {}
            section = file_config.get(name, {})
            if not isinstance(section, dict):
                raise ConfigError(name, section, 'a JSON object')
            values.update(section)
            if name in SEEDED and flags.get('seed') is not None:
                values['seed'] = seed
            for key, value in flags.items():
                if key.startswith(f"{name}.") and value is not None:
                    values[key.split('.', 1)[1]] = value
            try:
                sections[name] = section_cls(**values)
            except TypeError as e:
                raise ConfigError(name, sorted(values), f"known {section_cls.__name__} fields ({e})")

        inputs = {
            key: (str(value) if not isinstance(value, list) else [str(v) for v in value])
            for key, value in flags.items()
            if key.startswith('input.') and value is not None
        }
        inputs = {key.split('.', 1)[1]: value for key, value in inputs.items()}
        subcommand = flags['command'] if not flags.get('annot_command') else f"annot {flags['annot_command']}"
        options = {key: value for key, value in flags.items() if '.' not in key and key not in NOT_ECHOED}
        run = cls(
            subcommand, inputs, seed, resolve_threads(flags.get('threads')),
            flags.get('output'), options, **sections,
        )
        logging.info(f"running {run}")
        return run

    def to_dict(self):
        # thread count and output location are not echoed
        return {
            'subcommand': self.subcommand,
            'inputs': dict(sorted(self.inputs.items())),
            'options': dict(sorted(self.options.items())),
            'seed': self.seed,
            **{name: getattr(self, name).to_dict() for name in SECTIONS},
        }
