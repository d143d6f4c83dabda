"""Fast built-in property checks, run by ``lpface selftest``."""
from __future__ import annotations

import numpy as np

from . import mlp
from .eigenspace import build_eigenspace, center, mean_image, symmetric_eigen
from .image import GrayImage, decode_pgm, encode_pgm, resize_nearest, rotate_nearest
from .logpolar import LogPolarConfig, column_shift, log_polar_transform
from .synthetic import face_fixture


def check_pgm_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(50):
        w, h = rng.integers(1, 40, size=2)
        img = GrayImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))
        if decode_pgm(encode_pgm(img)) != img:
            return False, f"round trip changed a {w}x{h} image"
    return True, "50 random images"


def check_logpolar_invariance():
    worst_rot, worst_scale = 0.0, 0.0
    for seed in range(5):
        img = face_fixture(seed)
        base = log_polar_transform(img)
        side = base.width
        for deg in (15, 30, 45, 90):
            rotated = log_polar_transform(rotate_nearest(img, deg))
            shifted = column_shift(base, round(deg * side / 360))
            diff = np.abs(rotated.pixels.astype(float) - shifted.pixels).mean()
            worst_rot = max(worst_rot, diff)
        for s in (2, 3):
            up = resize_nearest(img, img.width * s, img.height * s)
            cfg = LogPolarConfig(size=side).scaled(s)
            diff = np.abs(log_polar_transform(up, cfg).pixels.astype(float) - base.pixels).mean()
            worst_scale = max(worst_scale, diff)
    ok = worst_rot <= 10 and worst_scale <= 10
    return ok, f"worst rotation diff {worst_rot:.2f}, worst scale diff {worst_scale:.2f} (limit 10)"


def check_gram_equivalence():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(20):
        h, p = rng.integers(3, 13), rng.integers(2, 7)
        x = rng.normal(size=(h, p)) * 10
        mean = mean_image(x)
        data = center(x, mean)
        space = build_eigenspace(data, mean, max_u=None)
        direct, _ = symmetric_eigen(data @ data.T)
        direct = direct[: space.n_components]
        worst = max(worst, float(np.max(np.abs(space.eigenvalues - direct) / direct)))
    return worst <= 1e-8, f"max relative eigenvalue gap {worst:.2e}"


def check_gradients():
    rng = np.random.default_rng(2)
    worst = 0.0
    for trial in range(10):
        sizes = list(rng.integers(1, 5, size=rng.integers(2, 5)))
        net = mlp.init_network(sizes, seed=trial)
        x = rng.normal(size=(3, sizes[0]))
        d = rng.uniform(-1, 1, size=(3, sizes[-1]))
        grads = mlp.backward(net, x, d)
        for param, grad in zip(net.params(), grads):
            for idx in np.ndindex(param.shape):
                keep = param[idx]
                param[idx] = keep + 1e-6
                up = mlp.batch_error(net, x, d)
                param[idx] = keep - 1e-6
                down = mlp.batch_error(net, x, d)
                param[idx] = keep
                numeric = (up - down) / 2e-6
                denom = max(abs(numeric), abs(grad[idx]), 1e-7)
                worst = max(worst, abs(numeric - grad[idx]) / denom)
    return worst < 1e-5, f"max relative gradient error {worst:.2e}"


def check_xor():
    x = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=float)
    d = np.array([[-1], [1], [1], [-1]], dtype=float)
    hits = 0
    for seed in range(5):
        net = mlp.init_network([2, 4, 1], seed)
        run = mlp.train(net, x, d, mlp.Hyperparams(max_epochs=5000, e_max=0.0, seed=seed))
        hits += min(run.errors + [run.final_error]) < 0.01
    return hits >= 4, f"{hits}/5 seeds reach E < 0.01 within 5000 epochs"


CHECKS = {
    "pgm-roundtrip": check_pgm_roundtrip,
    "logpolar-invariance": check_logpolar_invariance,
    "gram-equivalence": check_gram_equivalence,
    "mlp-gradients": check_gradients,
    "xor-convergence": check_xor,
}


def run_all():
    return [(name, *fn()) for name, fn in CHECKS.items()]
