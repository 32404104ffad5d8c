import struct

import numpy as np
import pytest

from lpart.errors import FormatError
from lpart.streams import (
    FeatureSample,
    MaskSchedule,
    UNLABELED,
    load_any,
    mask_labels,
    normalize,
    read_all,
    read_csv,
    read_header,
    read_stream,
    shuffle,
    synth_clusters,
    synth_split,
    write_csv,
    write_stream,
)


def sample(label, *values):
    return FeatureSample(label=label, values=np.array(values, dtype=np.float32))


def write_tmp(tmp_path, samples, dim, num_classes, name="data.lpft", **kw):
    path = tmp_path / name
    write_stream(path, samples, dim, num_classes, **kw)
    return path


# ---- binary round-trip ----

def test_round_trip_exact(tmp_path):
    samples = [sample(0, 0.25, 0.75), sample(UNLABELED, 0.1, 0.9), sample(4, 1.0, 0.0)]
    path = write_tmp(tmp_path, samples, 2, 5)
    header, back = read_all(path)
    assert header.count == 3 and header.dim == 2 and header.num_classes == 5
    for a, b in zip(samples, back):
        assert a.label == b.label
        assert np.array_equal(a.values, b.values)


def test_round_trip_preserves_float32_bits(tmp_path):
    rng = np.random.default_rng(0)
    samples = [
        FeatureSample(label=int(rng.integers(-1, 3)), values=rng.random(4, dtype=np.float32))
        for _ in range(50)
    ]
    path = write_tmp(tmp_path, samples, 4, 3)
    _, back = read_all(path)
    for a, b in zip(samples, back):
        assert a.values.tobytes() == b.values.tobytes()


def test_empty_stream_round_trip(tmp_path):
    path = write_tmp(tmp_path, [], 3, 2)
    header, back = read_all(path)
    assert header.count == 0 and back == []


def test_streaming_read_is_lazy(tmp_path):
    path = write_tmp(tmp_path, [sample(0, 0.5), sample(1, 0.5)], 1, 2)
    it = read_stream(path)
    assert next(it).label == 0
    assert next(it).label == 1


# ---- format errors ----

def test_bad_magic(tmp_path):
    path = tmp_path / "bad.lpft"
    path.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(FormatError, match="magic"):
        read_header(path)


def test_bad_version(tmp_path):
    path = tmp_path / "bad.lpft"
    path.write_bytes(struct.pack("<4sIQII", b"LPFT", 9, 0, 1, 1))
    with pytest.raises(FormatError, match="version"):
        read_header(path)


def test_truncated_header(tmp_path):
    path = tmp_path / "bad.lpft"
    path.write_bytes(b"LPFT\x01\x00")
    with pytest.raises(FormatError, match="truncated") as err:
        read_header(path)
    assert err.value.offset == 6


def test_truncated_record_reports_offset(tmp_path):
    good = write_tmp(tmp_path, [sample(0, 0.5), sample(1, 0.5)], 1, 2)
    data = good.read_bytes()
    bad = tmp_path / "cut.lpft"
    bad.write_bytes(data[:-3])
    with pytest.raises(FormatError, match="record 1"):
        list(read_stream(bad))


def test_label_out_of_class_range(tmp_path):
    path = tmp_path / "bad.lpft"
    payload = struct.pack("<4sIQII", b"LPFT", 1, 1, 1, 5) + struct.pack("<if", 7, 0.5)
    path.write_bytes(payload)
    with pytest.raises(FormatError, match=r"label 7") as err:
        list(read_stream(path))
    assert err.value.offset == 24


def test_feature_out_of_range_strict_only(tmp_path):
    path = write_tmp(tmp_path, [sample(0, 6.0)], 1, 2, check_range=False)
    with pytest.raises(FormatError, match=r"outside \[0, 1\]"):
        list(read_stream(path))
    assert [s.values[0] for s in read_stream(path, strict=False)] == [6.0]


def test_trailing_garbage_rejected(tmp_path):
    good = write_tmp(tmp_path, [sample(0, 0.5)], 1, 2)
    bad = tmp_path / "extra.lpft"
    bad.write_bytes(good.read_bytes() + b"x")
    with pytest.raises(FormatError, match="trailing"):
        list(read_stream(bad))


def test_write_validates_samples(tmp_path):
    with pytest.raises(ValueError, match="label"):
        write_tmp(tmp_path, [sample(9, 0.5)], 1, 3)
    with pytest.raises(ValueError, match="shape"):
        write_tmp(tmp_path, [sample(0, 0.5, 0.5)], 1, 3)
    with pytest.raises(ValueError, match=r"outside \[0, 1\]"):
        write_tmp(tmp_path, [sample(0, 1.5)], 1, 3)


# ---- CSV twin ----

def test_csv_round_trip(tmp_path):
    samples = [sample(0, 0.25, 0.75), sample(UNLABELED, 0.125, 0.5)]
    path = tmp_path / "data.csv"
    write_csv(path, samples)
    dim, back = read_csv(path)
    assert dim == 2
    for a, b in zip(samples, back):
        assert a.label == b.label
        assert np.array_equal(a.values, b.values)


def test_csv_header_line(tmp_path):
    path = tmp_path / "data.csv"
    write_csv(path, [sample(1, 0.5, 0.25, 0.125)])
    assert path.read_text().splitlines()[0] == "label,f0,f1,f2"


def test_load_any_infers_csv_classes(tmp_path):
    path = tmp_path / "data.csv"
    write_csv(path, [sample(0, 0.5), sample(3, 0.5), sample(UNLABELED, 0.5)])
    header, back = load_any(path)
    assert header.num_classes == 4 and header.dim == 1 and len(back) == 3


def test_csv_rejects_malformed(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("label,f0\n0,0.5\n1\n")
    with pytest.raises(FormatError, match="line 3"):
        read_csv(path)


# ---- normalization ----

def test_normalize_affine_map(tmp_path):
    src = write_tmp(
        tmp_path, [sample(0, 2.0), sample(1, 4.0), sample(0, 6.0)], 1, 2,
        check_range=False, name="raw.lpft",
    )
    dst = tmp_path / "norm.lpft"
    report = normalize(src, dst)
    assert report == [(2.0, 6.0)]
    _, back = read_all(dst)
    assert [float(s.values[0]) for s in back] == [0.0, 0.5, 1.0]


def test_normalize_report_min_max(tmp_path):
    src = write_tmp(
        tmp_path, [sample(0, 2.0, -1.0), sample(1, 6.0, 3.0)], 2, 2,
        check_range=False, name="raw.lpft",
    )
    report = normalize(src, tmp_path / "norm.lpft")
    assert report == [(2.0, 6.0), (-1.0, 3.0)]


def test_normalize_identity_on_unit_range(tmp_path):
    src = write_tmp(tmp_path, [sample(0, 0.0, 1.0), sample(1, 1.0, 0.0),
                               sample(0, 0.25, 0.5)], 2, 2, name="unit.lpft")
    dst = tmp_path / "norm.lpft"
    normalize(src, dst)
    _, back = read_all(dst)
    assert np.array_equal(back[2].values, [0.25, 0.5])


def test_normalize_constant_dimension(tmp_path):
    src = write_tmp(
        tmp_path, [sample(0, 5.0, 1.0), sample(1, 5.0, 2.0)], 2, 2,
        check_range=False, name="raw.lpft",
    )
    dst = tmp_path / "norm.lpft"
    normalize(src, dst)
    _, back = read_all(dst)
    assert [float(s.values[0]) for s in back] == [0.5, 0.5]


def test_normalize_idempotent(tmp_path):
    rng = np.random.default_rng(1)
    samples = [
        FeatureSample(label=0, values=(rng.random(3) * 7 - 2).astype(np.float32))
        for _ in range(40)
    ]
    raw = write_tmp(tmp_path, samples, 3, 1, check_range=False, name="raw.lpft")
    once = tmp_path / "once.lpft"
    twice = tmp_path / "twice.lpft"
    normalize(raw, once)
    normalize(once, twice)
    _, a = read_all(once)
    _, b = read_all(twice)
    for s, t in zip(a, b):
        assert np.allclose(s.values, t.values, atol=1e-12, rtol=0)


# ---- label masking ----

def masked_stream(n=20, seed=3):
    rng = np.random.default_rng(seed)
    return [
        FeatureSample(label=int(rng.integers(0, 4)), values=rng.random(2, dtype=np.float32))
        for _ in range(n)
    ]


def as_tuples(samples):
    return [(s.label, s.values.tobytes()) for s in samples]


def test_mask_rate_one_keeps_everything():
    samples = masked_stream()
    assert as_tuples(mask_labels(samples, MaskSchedule(1.0, 9))) == as_tuples(samples)


def test_mask_rate_zero_unlabels_everything():
    out = mask_labels(masked_stream(), MaskSchedule(0.0, 9))
    assert all(s.label == UNLABELED for s in out)


def test_mask_preserves_features_order_and_unlabeled():
    samples = masked_stream() + [sample(UNLABELED, 0.5, 0.5)]
    out = mask_labels(samples, MaskSchedule(0.3, 17))
    assert len(out) == len(samples)
    for a, b in zip(samples, out):
        assert np.array_equal(a.values, b.values)
        assert b.label in (a.label, UNLABELED)
    assert out[-1].label == UNLABELED


def test_mask_deterministic_and_binomially_plausible():
    rng = np.random.default_rng(0)
    samples = [
        FeatureSample(label=0, values=rng.random(1, dtype=np.float32)) for _ in range(10_000)
    ]
    out1 = mask_labels(samples, MaskSchedule(0.5, 42))
    out2 = mask_labels(samples, MaskSchedule(0.5, 42))
    kept = sum(1 for s in out1 if s.label != UNLABELED)
    assert 4800 <= kept <= 5200
    assert [s.label for s in out1] == [s.label for s in out2]


def test_mask_schedule_validation():
    with pytest.raises(ValueError):
        MaskSchedule(1.5, 0)
    with pytest.raises(ValueError):
        MaskSchedule(0.5, -1)


# ---- shuffling ----

def test_shuffle_deterministic():
    samples = masked_stream(50)
    assert as_tuples(shuffle(samples, 7)) == as_tuples(shuffle(samples, 7))


def test_shuffle_different_seeds_differ():
    samples = masked_stream(50)
    assert as_tuples(shuffle(samples, 7)) != as_tuples(shuffle(samples, 8))


def test_shuffle_permutes_multiset():
    samples = masked_stream(50)
    out = shuffle(samples, 8)
    assert as_tuples(out) != as_tuples(samples)
    assert sorted(as_tuples(out)) == sorted(as_tuples(samples))


def test_shuffle_matches_reference_trace():
    # independent replay of the documented backward Fisher-Yates swap trace
    samples = [sample(i, i / 10) for i in range(10)]
    seed = 123
    rng = np.random.Generator(np.random.PCG64(seed))
    order = list(range(10))
    for i in range(9, 0, -1):
        j = int(rng.integers(0, i + 1))
        order[i], order[j] = order[j], order[i]
    expected = [samples[k].label for k in order]
    assert [s.label for s in shuffle(samples, seed)] == expected


# ---- synthetic blobs ----

def test_synth_single_class_fully_labeled():
    samples = synth_clusters(1, 3, 25, 0.05, 2)
    assert len(samples) == 25
    assert all(s.label == 0 for s in samples)


def test_synth_tiny_spread_sticks_to_centers():
    samples = synth_clusters(3, 2, 30, 1e-9, 5)
    for c in range(3):
        values = np.array([s.values for s in samples if s.label == c])
        assert values.std(axis=0).max() < 1e-6


def test_synth_nearest_centroid_oracle():
    samples = synth_clusters(3, 2, 400, 0.02, 11)
    values = np.array([s.values for s in samples])
    labels = np.array([s.label for s in samples])
    centroids = np.array([values[labels == c].mean(axis=0) for c in range(3)])
    predicted = np.argmin(
        np.linalg.norm(values[:, None, :] - centroids[None, :, :], axis=2), axis=1
    )
    assert (predicted == labels).mean() >= 0.99


def test_synth_split_shares_centers_but_not_samples(tmp_path):
    train, test = synth_split(4, 3, 50, 20, 0.01, 21)
    assert len(train) == 200 and len(test) == 80
    train_bytes = {s.values.tobytes() for s in train}
    assert not any(s.values.tobytes() in train_bytes for s in test)
    for c in range(4):
        tr = np.array([s.values for s in train if s.label == c]).mean(axis=0)
        te = np.array([s.values for s in test if s.label == c]).mean(axis=0)
        assert np.linalg.norm(tr - te) < 0.02


def test_synth_validates():
    with pytest.raises(ValueError):
        synth_clusters(3, 2, 10, 0.0, 1)
    with pytest.raises(ValueError):
        synth_clusters(0, 2, 10, 0.1, 1)
