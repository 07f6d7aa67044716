"""Body-orientation estimation from 32x32 person crops and utility-based robot repositioning."""
from .kernels import BACKEND
from .labels import angle_to_class, angular_difference, body_orientation_from_joints
from .nnet import OrientationModel, TrainConfig, build_paper_model, load_model, predict, save_model, train

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "OrientationModel", "TrainConfig", "angle_to_class", "angular_difference",
    "body_orientation_from_joints", "build_paper_model", "load_model", "predict", "save_model",
    "train", "__version__",
]
