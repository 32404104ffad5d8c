import numpy as np
import pytest

from lpart import ArtHyperParams, FamModel, LpartHyperParams, LpartModel
from lpart.errors import FormatError


def trained_model(n=100, seed=2, num_classes=3, dim=2, rho=0.85):
    params = LpartHyperParams(num_classes=num_classes, art=ArtHyperParams(rho=rho, beta=0.6),
                              delta=0.4, c_uncert=2.5, k_sens=0.8)
    model = LpartModel(dim, params)
    rng = np.random.default_rng(seed)
    for _ in range(n):
        y = int(rng.integers(0, num_classes)) if rng.random() < 0.3 else None
        model.observe(rng.random(dim), y)
    return model, rng


def test_empty_model_round_trip():
    model = LpartModel(3, LpartHyperParams(num_classes=4))
    back = LpartModel.restore(model.snapshot())
    assert back.num_nodes == 0 and back.dim == 3
    assert back.params == model.params
    assert back.snapshot() == model.snapshot()


def test_round_trip_then_identical_continuation():
    model, rng = trained_model(100)
    restored = LpartModel.restore(model.snapshot())
    state = rng.bit_generator.state
    follow = np.random.default_rng()
    follow.bit_generator.state = state
    for _ in range(100):
        x = rng.random(2)
        y = int(rng.integers(0, 3)) if rng.random() < 0.3 else None
        model.observe(x, y)
        x2 = follow.random(2)
        y2 = int(follow.integers(0, 3)) if follow.random() < 0.3 else None
        restored.observe(x2, y2)
    assert model.num_nodes == restored.num_nodes
    assert model.snapshot() == restored.snapshot()


def test_snapshot_magic_and_version():
    model, _ = trained_model(5)
    data = model.snapshot()
    assert data[:4] == b"LPMS"


def test_truncated_snapshot_rejected():
    model, _ = trained_model(20)
    data = model.snapshot()
    for cut in (3, 11, 40, len(data) - 5):
        with pytest.raises(FormatError):
            LpartModel.restore(data[:cut])


def test_corrupt_snapshot_rejected():
    model, _ = trained_model(20)
    data = bytearray(model.snapshot())
    data[len(data) // 2] ^= 0xFF
    with pytest.raises(FormatError, match="checksum"):
        LpartModel.restore(bytes(data))


def test_wrong_magic_rejected():
    model, _ = trained_model(5)
    fam = FamModel(2, 3)
    fam.observe([0.5, 0.5], 1)
    with pytest.raises(FormatError, match="magic"):
        LpartModel.restore(fam.snapshot())
    with pytest.raises(FormatError, match="magic"):
        FamModel.restore(model.snapshot())


def test_save_load_file(tmp_path):
    model, _ = trained_model(30)
    path = tmp_path / "model.lpms"
    model.save(path)
    assert LpartModel.load(path).snapshot() == model.snapshot()


def test_fam_round_trip():
    rng = np.random.default_rng(4)
    fam = FamModel(2, 3, art=ArtHyperParams(rho=0.8), match_eps=2e-6)
    for _ in range(60):
        fam.observe(rng.random(2), int(rng.integers(0, 3)))
    back = FamModel.restore(fam.snapshot())
    assert back.num_nodes == fam.num_nodes
    assert back.match_eps == fam.match_eps
    assert back.snapshot() == fam.snapshot()
    probe = rng.random(2)
    assert back.predict(probe) == fam.predict(probe)


def test_fam_truncation_and_corruption():
    fam = FamModel(1, 2)
    fam.observe([0.5], 1)
    data = bytearray(fam.snapshot())
    with pytest.raises(FormatError):
        FamModel.restore(bytes(data[:-1]))
    data[10] ^= 0x40
    with pytest.raises(FormatError):
        FamModel.restore(bytes(data))
