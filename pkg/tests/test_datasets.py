import numpy as np
import pytest

from hypolo.datasets import (DEFAULT_OUTLIERS, Dataset, ToySpec, format_embedding,
                             generate_toy, load_embedding, load_mammals, parse_embedding,
                             save_embedding, standard_normal_pair, make_rng)
from hypolo.errors import DegenerateLabels, DuplicateId, InvalidSpec, OutsideDisk, ParseError


def test_toy_default_shape():
    d = generate_toy()
    assert len(d) == 85
    assert d.outlier_mask.sum() == 5
    np.testing.assert_array_equal(d.points[-5:], np.array(DEFAULT_OUTLIERS))
    assert d.names[0] == "A0" and d.names[40] == "B0" and d.names[-1] == "C4"


def test_toy_deterministic():
    a, b = generate_toy(ToySpec(seed=3)), generate_toy(ToySpec(seed=3))
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, generate_toy(ToySpec(seed=4)).points)


def test_toy_zero_spread_duplicates_centres():
    d = generate_toy(ToySpec(spread=0.0))
    np.testing.assert_array_equal(d.points[:40], np.tile([-0.45, 0.0], (40, 1)))


def test_toy_cluster_statistics():
    d = generate_toy(ToySpec(points_per_cluster=4000, seed=1))
    a = d.points[:4000]
    np.testing.assert_allclose(a.mean(axis=0), [-0.45, 0.0], atol=0.005)
    np.testing.assert_allclose(a.std(axis=0), [0.08, 0.08], rtol=0.05)


def test_toy_points_per_cluster():
    assert len(generate_toy(ToySpec(points_per_cluster=10))) == 25


@pytest.mark.parametrize("spec", [
    ToySpec(centers=((0.0, 0.0),)),
    ToySpec(centers=((1.2, 0.0), (0.0, 0.0))),
    ToySpec(spread=-0.1),
    ToySpec(points_per_cluster=-1),
    ToySpec(outliers=((0.0, 1.0),)),
])
def test_toy_invalid(spec):
    with pytest.raises(InvalidSpec):
        generate_toy(spec)


def test_box_muller_moments():
    rng = make_rng(0)
    z = np.array([standard_normal_pair(rng) for _ in range(20000)]).ravel()
    assert abs(z.mean()) < 0.02
    assert abs(z.std() - 1) < 0.02


def test_dataset_is_read_only():
    d = generate_toy()
    with pytest.raises(ValueError):
        d.points[0, 0] = 0.0


def test_unlabelled_mask_raises():
    with pytest.raises(DegenerateLabels):
        Dataset(np.zeros((2, 2))).outlier_mask


def test_take_renumbers():
    d = generate_toy(ToySpec(points_per_cluster=3))
    t = d.take([7, 0])
    assert t.names == ("C1", "A0")
    assert list(t.ids) == [0, 1]


# -- TSV ------------------------------------------------------------------------

def test_parse_with_header_and_reorder():
    text = "id\tx\ty\tlabel\tname\n1\t0.1\t0.2\toutlier\tb\n0\t0\t0\tinlier\ta\n"
    d = parse_embedding(text)
    np.testing.assert_array_equal(d.points, [[0, 0], [0.1, 0.2]])
    assert d.labels == ("inlier", "outlier")
    assert d.names == ("a", "b")


def test_parse_without_labels():
    d = parse_embedding("0\t0.1\t0.1\n1\t-0.2\t0.3\n")
    assert d.labels is None and d.names is None


def test_parse_outside_disk_reports_line():
    with pytest.raises(OutsideDisk, match="line 3"):
        parse_embedding("id\tx\ty\n0\t0\t0\n1\t1.5\t0\n")


@pytest.mark.parametrize("text, match", [
    ("0\t0\n", "line 1"),
    ("0\tabc\t0\n", "line 1"),
    ("0\t0\t0\tmaybe\n", "unknown label"),
    ("1\t0\t0\n", "cover"),
    ("x\t0\t0\n", "bad id"),
])
def test_parse_errors(text, match):
    with pytest.raises(ParseError, match=match):
        parse_embedding(text)


def test_duplicate_id():
    with pytest.raises(DuplicateId, match="line 2"):
        parse_embedding("0\t0\t0\n0\t0.1\t0\n")


def test_roundtrip_is_exact(tmp_path):
    d = generate_toy(ToySpec(seed=9))
    p = tmp_path / "toy.tsv"
    save_embedding(d, p)
    back = load_embedding(p)
    np.testing.assert_array_equal(back.points, d.points)
    assert back.labels == d.labels and back.names == d.names
    assert format_embedding(back) == p.read_text()


def test_load_counts_synthetic_mammals_sized_file(tmp_path):
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.6, 0.6, (1191, 2))
    labels = ["inlier"] * 1180 + ["outlier"] * 11
    p = tmp_path / "m.tsv"
    save_embedding(Dataset(pts, labels), p)
    d = load_embedding(p)
    assert len(d) == 1191 and d.outlier_mask.sum() == 11


def test_unsupported_format(tmp_path):
    with pytest.raises(ValueError):
        load_embedding(tmp_path / "x.csv", format="csv")


def test_mammals_fixture():
    d = load_mammals()
    assert d.outlier_mask.sum() == 11
    assert d.names[0] == "mammal.n.01"
    assert "shark.n.01" in d.names
    assert np.all(np.hypot(*d.points.T) < 1)
