"""Load and save parameter sets and initial states as JSON."""

import json
import os
from typing import Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from model.schema import CoherentSuperposition, FeedbackConfig
from utils.logger import logger

ModelT = TypeVar("ModelT", bound=BaseModel)


def save_model(obj: BaseModel, path: str) -> None:
    """Write any record as indented JSON (complex numbers as [re, im])."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj.model_dump(mode="json"), f, indent=2)


def load_model(model_cls: Type[ModelT], path: str) -> Optional[ModelT]:
    """Load a record from JSON. Returns None if the file does not exist."""
    if not os.path.exists(path):
        return None

    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.warning(f"Failed to read {path}: {e}")
        return None

    try:
        return model_cls(**data)
    except ValidationError as e:
        logger.warning(f"Invalid {model_cls.__name__} in {path}: {e}")
        return None


def save_config(cfg: FeedbackConfig, path: str) -> None:
    save_model(cfg, path)


def load_config(path: str) -> Optional[FeedbackConfig]:
    return load_model(FeedbackConfig, path)


def save_state(state: CoherentSuperposition, path: str) -> None:
    save_model(state, path)


def load_state(path: str) -> Optional[CoherentSuperposition]:
    return load_model(CoherentSuperposition, path)
