"""Toy-scale image-to-image GAN trainers for color constancy.

Three small architectures (a paired U-Net translator, an unpaired
cycle-consistent pair, and a single multi-domain generator) train on
synthetic datasets and hand their predictions to the benchmark harness
through its file bridge. The benchmark package is never imported; the two
sides meet only at documented file formats and the ``ccbench`` CLI.
"""

from .config import Architecture, DomainSpec, GanConfig, config_from_dict, \
    config_to_dict, load_config, validate_config
from .consistency import DomainResult, consistency_check, render_consistency_table
from .data import Dataset, Sample, load_manifest, load_sample_image, read_image, \
    split_ids, srgb_decode, srgb_encode, white_balanced, write_bridge, write_image
from .errors import CCGanError, ConfigError, DataError, TrainingDiverged
from .losses import adversarial_value, classification_loss, cycle_loss, \
    cyclegan_total, discriminator_loss, generator_adversarial_loss, l1_loss, \
    pix2pix_total, stargan_total
from .networks import PatchDiscriminator, ResnetGenerator, StarGenerator, UNetGenerator
from .predict import generate, predict
from .train import TrainedModel, build_generator, ensure_finite, load_model, \
    save_model, train

__all__ = [
    "Architecture", "CCGanError", "ConfigError", "DataError", "Dataset",
    "DomainResult", "DomainSpec", "GanConfig", "PatchDiscriminator",
    "ResnetGenerator", "Sample", "StarGenerator", "TrainedModel",
    "TrainingDiverged", "UNetGenerator", "adversarial_value", "build_generator",
    "classification_loss", "config_from_dict", "config_to_dict",
    "consistency_check", "cycle_loss", "cyclegan_total", "discriminator_loss",
    "ensure_finite", "generate", "generator_adversarial_loss", "l1_loss",
    "load_config", "load_manifest", "load_model", "load_sample_image",
    "pix2pix_total", "predict", "read_image", "render_consistency_table",
    "save_model", "split_ids", "srgb_decode", "srgb_encode", "stargan_total",
    "train", "validate_config", "white_balanced", "write_bridge", "write_image",
]

__version__ = "0.1.0"
