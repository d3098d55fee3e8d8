"""Training loops for the three architectures.

Each epoch logs the reduced loss components plus a total recomputed from
those logged values, so ``total == adversarial + weight * cycle`` holds on
the log floats themselves, not merely in expectation. A non-finite value
in any logged component aborts the run immediately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from . import losses
from .config import Architecture, GanConfig, config_from_dict, config_to_dict
from .data import Dataset, batch_indices, load_manifest, load_sample_image, \
    load_training_tensors, resize, split_ids, srgb_encode, to_tensor, white_balanced
from .errors import DataError, TrainingDiverged


@dataclass(frozen=True)
class TrainedModel:
    config: GanConfig
    generator: nn.Module
    log: tuple[dict, ...]
    # pix2pix/cyclegan map one fixed direction and carry no domain list;
    # stargan lists ("input", <named targets...>) in one-hot index order.
    domain_names: tuple[str, ...]
    manifest_name: str

    @property
    def architecture(self) -> Architecture:
        return self.config.architecture


def build_generator(cfg: GanConfig) -> nn.Module:
    from .networks import ResnetGenerator, StarGenerator, UNetGenerator
    if cfg.architecture is Architecture.PIX2PIX:
        return UNetGenerator(cfg.base_channels)
    if cfg.architecture is Architecture.CYCLEGAN:
        return ResnetGenerator(cfg.base_channels, cfg.resnet_blocks)
    return StarGenerator(1 + len(cfg.domains), cfg.base_channels, cfg.resnet_blocks)


def ensure_finite(row: dict, epoch: int) -> None:
    """Abort on the first non-finite logged value instead of training on."""
    bad = {k: v for k, v in row.items() if not math.isfinite(v)}
    if bad:
        raise TrainingDiverged(
            f"epoch {epoch}: non-finite loss component(s) {bad}; "
            "lower the learning rate or check the input data")


def _adam(params, lr: float) -> torch.optim.Adam:
    return torch.optim.Adam(params, lr=lr, betas=(0.5, 0.999))


def _epoch_lr(base_lr: float, epoch: int, epochs: int) -> float:
    """Full rate for the first half, then a straight line toward zero.

    The adversarial game keeps orbiting a solution at constant step size;
    annealing the endgame freezes the generators near equilibrium instead
    of sampling a random point of that orbit at the final epoch.
    """
    half = epochs // 2
    if epoch < half or epochs == 1:
        return base_lr
    return base_lr * (epochs - epoch) / (epochs - half)


def _set_lr(optimizers, lr: float) -> None:
    for opt in optimizers:
        for group in opt.param_groups:
            group["lr"] = lr


def _train_pix2pix(cfg: GanConfig, xs: torch.Tensor, ys: torch.Tensor,
                   rng: np.random.Generator) -> tuple[nn.Module, list[dict]]:
    from .networks import PatchDiscriminator
    gen = build_generator(cfg)
    disc = PatchDiscriminator(cfg.base_channels)
    opt_g = _adam(gen.parameters(), cfg.learning_rate)
    opt_d = _adam(disc.parameters(), cfg.learning_rate)

    log = []
    for epoch in range(cfg.epochs):
        _set_lr((opt_g, opt_d), _epoch_lr(cfg.learning_rate, epoch, cfg.epochs))
        sums = {"adversarial": 0.0, "l1": 0.0, "discriminator": 0.0}
        batches = batch_indices(len(xs), cfg.batch_size, rng)
        for idx in batches:
            x, y = xs[idx], ys[idx]
            fake = gen(x)

            opt_d.zero_grad()
            d_loss = losses.discriminator_loss(disc(y), disc(fake.detach()))
            d_loss.backward()
            opt_d.step()

            opt_g.zero_grad()
            adv = losses.generator_adversarial_loss(disc(fake))
            l1 = losses.l1_loss(fake, y)
            (adv + l1).backward()
            opt_g.step()

            sums["adversarial"] += adv.item()
            sums["l1"] += l1.item()
            sums["discriminator"] += d_loss.item()
        n = len(batches)
        row = {k: v / n for k, v in sums.items()}
        row["total"] = losses.pix2pix_total(row["adversarial"], row["l1"])
        ensure_finite(row, epoch)
        log.append(row)
    return gen, log


def _train_cyclegan(cfg: GanConfig, xs: torch.Tensor, ys: torch.Tensor,
                    rng: np.random.Generator) -> tuple[nn.Module, list[dict]]:
    from .networks import PatchDiscriminator, ResnetGenerator
    gen_f = build_generator(cfg)                                   # observed -> balanced
    gen_b = ResnetGenerator(cfg.base_channels, cfg.resnet_blocks)  # balanced -> observed
    disc_y = PatchDiscriminator(cfg.base_channels)
    disc_x = PatchDiscriminator(cfg.base_channels)
    opt_g = _adam(list(gen_f.parameters()) + list(gen_b.parameters()), cfg.learning_rate)
    opt_d = _adam(list(disc_y.parameters()) + list(disc_x.parameters()), cfg.learning_rate)

    log = []
    for epoch in range(cfg.epochs):
        _set_lr((opt_g, opt_d), _epoch_lr(cfg.learning_rate, epoch, cfg.epochs))
        sums = {"adversarial": 0.0, "cycle": 0.0, "discriminator": 0.0}
        # the two sides shuffle independently, so batches are unpaired
        bx = batch_indices(len(xs), cfg.batch_size, rng)
        by = batch_indices(len(ys), cfg.batch_size, rng)
        batches = list(zip(bx, by))
        for ix, iy in batches:
            x, y = xs[ix], ys[iy]
            fake_y = gen_f(x)
            fake_x = gen_b(y)

            opt_d.zero_grad()
            d_loss = (losses.discriminator_loss(disc_y(y), disc_y(fake_y.detach()))
                      + losses.discriminator_loss(disc_x(x), disc_x(fake_x.detach())))
            d_loss.backward()
            opt_d.step()

            opt_g.zero_grad()
            adv = (losses.generator_adversarial_loss(disc_y(fake_y))
                   + losses.generator_adversarial_loss(disc_x(fake_x)))
            cyc = (losses.cycle_loss(gen_b(fake_y), x)
                   + losses.cycle_loss(gen_f(fake_x), y))
            (adv + cfg.cycle_weight * cyc).backward()
            opt_g.step()

            sums["adversarial"] += adv.item()
            sums["cycle"] += cyc.item()
            sums["discriminator"] += d_loss.item()
        n = len(batches)
        row = {k: v / n for k, v in sums.items()}
        row["total"] = losses.cyclegan_total(row["adversarial"], row["cycle"], cfg.cycle_weight)
        ensure_finite(row, epoch)
        log.append(row)
    return gen_f, log


def _train_stargan(cfg: GanConfig, renders: torch.Tensor,
                   rng: np.random.Generator) -> tuple[nn.Module, list[dict]]:
    """renders: (D, N, 3, H, W) ground-truth appearance of every sample in
    every domain, input domain first.

    Source and target domains are drawn independently per sample, so every
    mapping direction gets trained and every domain appears as a cycle
    endpoint. Training only input-sourced batches leaves the named domains
    anchored by nothing but the classifier, which the generator learns to
    fool with off-distribution colors.
    """
    from .networks import PatchDiscriminator
    n_domains = renders.shape[0]
    n_samples = renders.shape[1]
    gen = build_generator(cfg)
    disc = PatchDiscriminator(cfg.base_channels, n_domains=n_domains)
    opt_g = _adam(gen.parameters(), cfg.learning_rate)
    opt_d = _adam(disc.parameters(), cfg.learning_rate)

    def one_hot(idx: torch.Tensor) -> torch.Tensor:
        return torch.eye(n_domains)[idx]

    log = []
    for epoch in range(cfg.epochs):
        _set_lr((opt_g, opt_d), _epoch_lr(cfg.learning_rate, epoch, cfg.epochs))
        sums = {"adversarial": 0.0, "cycle": 0.0, "classification": 0.0, "discriminator": 0.0}
        batches = batch_indices(n_samples, cfg.batch_size, rng)
        for idx in batches:
            rows = torch.from_numpy(idx)
            source = torch.from_numpy(rng.integers(0, n_domains, size=len(idx)))
            target = torch.from_numpy(rng.integers(0, n_domains, size=len(idx)))
            x = renders[source, rows]
            real = renders[target, rows]
            fake = gen(x, one_hot(target))

            opt_d.zero_grad()
            real_logits, real_cls = disc(real)
            fake_logits, _ = disc(fake.detach())
            d_loss = (losses.discriminator_loss(real_logits, fake_logits)
                      + cfg.cls_weight * losses.classification_loss(real_cls, target))
            d_loss.backward()
            opt_d.step()

            opt_g.zero_grad()
            fake_logits, fake_cls = disc(fake)
            adv = losses.generator_adversarial_loss(fake_logits)
            cls = losses.classification_loss(fake_cls, target)
            back = gen(fake, one_hot(source))
            cyc = losses.cycle_loss(back, x)
            (adv + cfg.cycle_weight * cyc + cfg.cls_weight * cls).backward()
            opt_g.step()

            sums["adversarial"] += adv.item()
            sums["cycle"] += cyc.item()
            sums["classification"] += cls.item()
            sums["discriminator"] += d_loss.item()
        n = len(batches)
        row = {k: v / n for k, v in sums.items()}
        row["total"] = losses.stargan_total(row["adversarial"], row["cycle"],
                                            row["classification"],
                                            cfg.cycle_weight, cfg.cls_weight)
        ensure_finite(row, epoch)
        log.append(row)
    return gen, log


def _stargan_renders(cfg: GanConfig, dataset: Dataset, ids: list[str]) -> torch.Tensor:
    """Ground-truth appearance stacks: input domain, then each named target.

    A named domain's look is the white-balanced scene relit by that
    domain's illuminant; the gt illuminants in the manifest make this
    supervision available for free on synthetic data.
    """
    per_domain: list[list[torch.Tensor]] = [[] for _ in range(1 + len(cfg.domains))]
    for sid in ids:
        sample = dataset.by_id(sid)
        obs = resize(load_sample_image(sample), cfg.image_size)
        canon = white_balanced(obs, sample.gt_illuminant)
        per_domain[0].append(to_tensor(srgb_encode(obs)))
        for d, dom in enumerate(cfg.domains, start=1):
            relit = canon * np.asarray(dom.illuminant, dtype=np.float32)
            per_domain[d].append(to_tensor(srgb_encode(relit)))
    return torch.stack([torch.stack(stack) for stack in per_domain])


def train(cfg: GanConfig, manifest_path: str) -> TrainedModel:
    """Fit the configured architecture on a manifest's training split."""
    dataset = load_manifest(manifest_path)
    train_ids, _ = split_ids([s.id for s in dataset.samples], cfg.split_seed, cfg.split_ratio)
    if not train_ids:
        raise DataError("the training split is empty")

    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    if cfg.architecture is Architecture.STARGAN:
        renders = _stargan_renders(cfg, dataset, train_ids)
        gen, log = _train_stargan(cfg, renders, rng)
        names = ("input",) + tuple(d.name for d in cfg.domains)
    else:
        xs, ys = load_training_tensors(dataset, train_ids, cfg.image_size)
        if cfg.architecture is Architecture.PIX2PIX:
            gen, log = _train_pix2pix(cfg, xs, ys, rng)
        else:
            gen, log = _train_cyclegan(cfg, xs, ys, rng)
        names = ()

    gen.eval()
    return TrainedModel(config=cfg, generator=gen, log=tuple(log),
                        domain_names=names, manifest_name=dataset.name)


def save_model(model: TrainedModel, path: str) -> None:
    payload = {
        "config": config_to_dict(model.config),
        "state": model.generator.state_dict(),
        "log": list(model.log),
        "domain_names": list(model.domain_names),
        "manifest_name": model.manifest_name,
    }
    # open the file here so a bad path surfaces as OSError, not a
    # serializer-specific error
    with open(path, "wb") as fh:
        torch.save(payload, fh)


def load_model(path: str) -> TrainedModel:
    try:
        blob = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise DataError(f"cannot load model {path}: {exc}") from exc
    if not isinstance(blob, dict) or "config" not in blob or "state" not in blob:
        raise DataError(f"{path} is not a saved model checkpoint")
    cfg = config_from_dict(blob["config"])
    gen = build_generator(cfg)
    gen.load_state_dict(blob["state"])
    gen.eval()
    return TrainedModel(config=cfg, generator=gen,
                        log=tuple(blob.get("log", [])),
                        domain_names=tuple(blob.get("domain_names", [])),
                        manifest_name=str(blob.get("manifest_name", "")))
