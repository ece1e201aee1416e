from .config import ExperimentConfig, TrainConfig, parse_config
from .model import ModelParams, forward, init_params
from .training import train
