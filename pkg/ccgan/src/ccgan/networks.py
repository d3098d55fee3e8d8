"""Small convolutional generators and a patch discriminator.

These are deliberately narrow builds of the standard image-to-image
architectures, sized for 64 px training on a single CPU core. Every
generator ends in tanh and preserves spatial shape; the discriminator
returns a patch grid of logits rather than one scalar per image.

There are no normalization layers. Instance or batch normalization
subtracts per-channel means, and a global color cast lives exactly in
those means; normalizing would erase the signal both the generators and
the discriminators need. The networks are small enough to train stably
without it.
"""

from __future__ import annotations

import torch
from torch import nn


def _init_weights(module: nn.Module) -> None:
    # conv layers start from N(0, 0.02), the usual GAN initialization
    if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d)):
        nn.init.normal_(module.weight, 0.0, 0.02)
        if module.bias is not None:
            nn.init.zeros_(module.bias)


def _down(cin: int, cout: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(cin, cout, 4, stride=2, padding=1),
        nn.LeakyReLU(0.2, inplace=True),
    )


def _up(cin: int, cout: int) -> nn.Sequential:
    return nn.Sequential(
        nn.ConvTranspose2d(cin, cout, 4, stride=2, padding=1),
        nn.ReLU(inplace=True),
    )


class UNetGenerator(nn.Module):
    """Encoder/decoder with skip connections and a full-resolution top level.

    Needs input sides divisible by 4 (two 2x downsamplings). The stride-1
    top level matters: with it, the skip path can carry pixel-exact detail
    to the output, so mappings close to identity are actually reachable
    instead of being blurred through a downsample.
    """

    def __init__(self, base_channels: int = 16):
        super().__init__()
        c = base_channels
        self.enc0 = nn.Sequential(nn.Conv2d(3, c, 3, 1, 1), nn.LeakyReLU(0.2, inplace=True))
        self.enc1 = _down(c, 2 * c)
        self.enc2 = _down(2 * c, 4 * c)
        self.mid = nn.Sequential(
            nn.Conv2d(4 * c, 4 * c, 3, 1, 1),
            nn.ReLU(inplace=True),
        )
        self.dec2 = _up(4 * c, 2 * c)
        self.dec1 = _up(4 * c, c)
        self.head = nn.Sequential(nn.Conv2d(2 * c, 3, 3, 1, 1), nn.Tanh())
        self.apply(_init_weights)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        e0 = self.enc0(x)
        e1 = self.enc1(e0)
        e2 = self.enc2(e1)
        m = self.mid(e2)
        d2 = self.dec2(m)
        d1 = self.dec1(torch.cat([d2, e1], dim=1))
        return self.head(torch.cat([d1, e0], dim=1))


class _ResBlock(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(channels, channels, 3, 1, 1),
            nn.ReLU(inplace=True),
            nn.Conv2d(channels, channels, 3, 1, 1),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.body(x)


class ResnetGenerator(nn.Module):
    """Conv stem, two downsamplings, residual trunk, two upsamplings."""

    def __init__(self, base_channels: int = 16, n_blocks: int = 2, in_channels: int = 3):
        super().__init__()
        c = base_channels
        layers: list[nn.Module] = [
            nn.Conv2d(in_channels, c, 7, 1, 3),
            nn.ReLU(inplace=True),
            _down(c, 2 * c),
            _down(2 * c, 4 * c),
        ]
        layers += [_ResBlock(4 * c) for _ in range(n_blocks)]
        layers += [
            _up(4 * c, 2 * c),
            _up(2 * c, c),
            nn.Conv2d(c, 3, 7, 1, 3),
            nn.Tanh(),
        ]
        self.body = nn.Sequential(*layers)
        self.apply(_init_weights)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.body(x)


class StarGenerator(nn.Module):
    """Single generator conditioned on a target-domain one-hot vector.

    The domain code is tiled into constant feature planes and concatenated
    onto the image, so one network serves every mapping direction.
    """

    def __init__(self, n_domains: int, base_channels: int = 16, n_blocks: int = 2):
        super().__init__()
        self.n_domains = n_domains
        self.body = ResnetGenerator(base_channels, n_blocks, in_channels=3 + n_domains)

    def forward(self, x: torch.Tensor, domain: torch.Tensor) -> torch.Tensor:
        if domain.ndim != 2 or domain.shape != (x.shape[0], self.n_domains):
            raise ValueError(
                f"domain vector must be (batch, {self.n_domains}), got {tuple(domain.shape)}")
        planes = domain[:, :, None, None].expand(-1, -1, x.shape[2], x.shape[3])
        return self.body(torch.cat([x, planes], dim=1))


class PatchDiscriminator(nn.Module):
    """Shallow conv stack scoring small overlapping patches.

    The receptive field is kept deliberately narrow (about 10 px): casts
    announce themselves in local color statistics, and a wide-context
    critic at this training scale mostly memorizes layouts instead.

    With ``n_domains`` set it grows a second head that pools the shared
    features into per-domain classification logits.
    """

    def __init__(self, base_channels: int = 16, n_domains: int = 0):
        super().__init__()
        c = base_channels
        self.features = nn.Sequential(
            nn.Conv2d(3, c, 4, 2, 1), nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(c, 2 * c, 4, 1, 1), nn.LeakyReLU(0.2, inplace=True),
        )
        self.patch = nn.Conv2d(2 * c, 1, 3, 1, 1)
        self.cls = nn.Conv2d(2 * c, n_domains, 1) if n_domains > 0 else None
        self.apply(_init_weights)

    def forward(self, x: torch.Tensor):
        h = self.features(x)
        logits = self.patch(h)
        if self.cls is None:
            return logits
        # global average over patch positions gives one vote per domain
        return logits, self.cls(h).mean(dim=(2, 3))
