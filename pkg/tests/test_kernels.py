"""Backend selection and pure/compiled parity."""

import itertools
import random
import subprocess
import sys

import pytest

from polich import kernels


def test_pure_backend_always_available():
    assert "pure" in kernels.available_backends()


def test_env_override_forces_pure():
    out = subprocess.run(
        [sys.executable, "-c", "from polich import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env={"POLICH_PURE": "1", "PATH": "/usr/bin:/bin"})
    assert out.stdout.strip() == "pure"


needs_compiled = pytest.mark.skipif(
    "compiled" not in kernels.available_backends(),
    reason="compiled backend not built")


@needs_compiled
def test_mask_parity_exhaustive():
    pure = kernels.load_backend("pure")
    compiled = kernels.load_backend("compiled")
    for phase, balance, unused in itertools.product(range(4), range(5), range(64)):
        for dneg, budget, strict in itertools.product([False, True], repeat=3):
            assert (pure.valid_mask(phase, balance, unused, dneg, budget, 3, strict)
                    == compiled.valid_mask(phase, balance, unused, dneg, budget, 3, strict))


@needs_compiled
def test_step_and_accepts_parity_random_walks():
    pure = kernels.load_backend("pure")
    compiled = kernels.load_backend("compiled")
    rng = random.Random(0)
    for _ in range(2000):
        phase, balance, unused = 0, 0, (1 << rng.randint(1, 5)) - 1
        walk = []
        for _ in range(16):
            mask = pure.valid_mask(phase, balance, unused, False, True, 3, False)
            if mask == 0:
                break
            token = rng.choice([t for t in range(17) if mask >> t & 1])
            assert (pure.step(phase, balance, unused, token)
                    == compiled.step(phase, balance, unused, token))
            phase, balance, unused = pure.step(phase, balance, unused, token)
            walk.append(token)
        if walk:
            start = (1 << rng.randint(1, 5)) - 1
            assert pure.accepts(walk, start) == compiled.accepts(walk, start)


def test_load_backend_rejects_unknown():
    with pytest.raises((ValueError, KeyError)):
        kernels.load_backend("gpu")
