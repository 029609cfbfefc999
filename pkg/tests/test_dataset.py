import math

import numpy as np
import pytest

from zeroloss.dataset import (
    LabeledDataset,
    SearchOptions,
    all_certified_orderings,
    certificate_from_json,
    certificate_to_json,
    check_clustered,
    class_stats,
    dataset_from_json,
    dataset_to_json,
    find_sls_certificate,
    gen_clustered,
    gen_sls,
    max_margin_separator,
    to_barycentric,
    verify_sls_certificate,
)
from zeroloss.errors import (
    DegenerateDirectionError,
    GenerationError,
    InvalidInputError,
    NotSeparableError,
    RankError,
    SchemaError,
    StaleCertificateError,
)


def singletons(points):
    return LabeledDataset(tuple(np.asarray(p, dtype=float)[:, None] for p in points))


class TestLabeledDataset:
    def test_shapes(self, rng):
        ds = LabeledDataset((rng.standard_normal((4, 3)), rng.standard_normal((4, 5))))
        assert (ds.ambient_dim, ds.class_count, ds.n_points) == (4, 2, 8)
        assert ds.Y_ext.shape == (2, 8)
        np.testing.assert_array_equal(ds.Y_ext[:, 3], [0.0, 1.0])

    def test_invariants(self, rng):
        with pytest.raises(InvalidInputError):
            LabeledDataset(tuple(rng.standard_normal((2, 3)) for _ in range(3)))
        with pytest.raises(RankError):
            LabeledDataset((np.ones((2, 1)), np.zeros((2, 1))), labels=np.ones((2, 2)))
        with pytest.raises(InvalidInputError):
            LabeledDataset((np.array([[np.inf]]),))

    def test_diameter_brute_force(self, rng):
        ds = LabeledDataset((rng.standard_normal((3, 30)), rng.standard_normal((3, 700))))
        X = ds.X
        brute = max(np.linalg.norm(X - X[:, [i]], axis=0).max() for i in range(X.shape[1]))
        assert ds.diameter == pytest.approx(brute, rel=1e-14)


class TestClassStats:
    def test_singletons(self):
        stats = class_stats(singletons([[1.0, 0.0], [0.0, 2.0]]))
        assert stats.delta == 0.0
        np.testing.assert_array_equal(stats.means[1], [0.0, 2.0])

    def test_two_classes_on_a_line(self):
        stats = class_stats(singletons([[-1.0, 0.0], [1.0, 0.0]]))
        np.testing.assert_allclose(stats.barycenter, [0.0, 0.0])
        np.testing.assert_allclose(stats.directions[0], [1.0, 0.0])
        np.testing.assert_allclose(stats.directions[1], [-1.0, 0.0])

    def test_delta_brute_force(self, rng):
        classes = tuple(rng.normal(loc=5 * j, size=(3, 40)) for j in range(3))
        ds = LabeledDataset(classes)
        brute = 0.0
        for C in classes:
            m = C.mean(axis=1)
            for i in range(C.shape[1]):
                brute = max(brute, float(np.linalg.norm(C[:, i] - m)))
        assert class_stats(ds).delta == brute

    def test_degenerate_direction(self):
        three = singletons([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        with pytest.raises(DegenerateDirectionError):
            class_stats(three)


class TestBarycentric:
    def test_vertices_and_barycenter(self, rng):
        ds = LabeledDataset(tuple(rng.standard_normal((5, 4)) for _ in range(3)))
        _, frame = to_barycentric(ds)
        K = frame.forward(ds.means)
        np.testing.assert_allclose(K[:3], np.eye(3), atol=1e-12)
        np.testing.assert_allclose(K[3:], 0.0, atol=1e-12)
        centre = frame.forward(ds.means.mean(axis=1))
        np.testing.assert_allclose(centre[:3], [1 / 3] * 3, atol=1e-12)

    def test_round_trip(self, rng):
        ds = LabeledDataset(tuple(rng.standard_normal((6, 4)) for _ in range(4)))
        moved, frame = to_barycentric(ds)
        X = rng.standard_normal((6, 1000)) * 10
        assert np.abs(frame.backward(frame.forward(X)) - X).max() <= 1e-10 * 10
        np.testing.assert_allclose(frame.backward(moved.X), ds.X, atol=1e-10)
        P = frame.complement_projector
        np.testing.assert_allclose(P @ P, P, atol=1e-12)
        np.testing.assert_allclose(P @ ds.means, 0.0, atol=1e-12)

    def test_dependent_means(self):
        ds = singletons([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
        with pytest.raises(RankError):
            to_barycentric(ds)


class TestCheckClustered:
    def test_singletons_pass(self):
        report = check_clustered(singletons(np.eye(4)[:3] * 3))
        assert report.passes and report.delta == 0.0
        assert max(report.theta_star_j) < math.pi
        assert math.pi / 2 <= report.theta_star < math.pi

    def test_overlap_fails(self, rng):
        ds = LabeledDataset(tuple(rng.normal(loc=0.1 * j, scale=1.0, size=(3, 50)) for j in range(3)))
        report = check_clustered(ds)
        assert not report.passes
        assert "clustercond1" in report.failure_reasons

    def test_generator_passes(self):
        assert check_clustered(gen_clustered(3, 5, 3, 50, 0.5)).passes

    def test_c0_range(self):
        with pytest.raises(InvalidInputError):
            check_clustered(singletons(np.eye(2)), 0.3)

    def test_scale_invariance(self, rng):
        ds = gen_clustered(11, 6, 4, 30, 0.8)
        base = check_clustered(ds)
        centre = ds.means.mean(axis=1, keepdims=True)
        for s in (0.01, 3.0, 250.0):
            scaled = ds.mapped(lambda C: centre + s * (C - centre))
            report = check_clustered(scaled)
            assert report.passes == base.passes
            np.testing.assert_allclose(report.theta_star_j, base.theta_star_j, rtol=1e-9)

    def test_report_json_handles_infinity(self, rng):
        ds = LabeledDataset(tuple(rng.normal(loc=0.1 * j, size=(3, 20)) for j in range(3)))
        doc = check_clustered(ds).to_json()
        assert all(t is None or math.isfinite(t) for t in doc["theta_star_j"])


class TestSeparator:
    def test_simple_split(self):
        inside = np.array([[-1.0, -2.0], [0.0, 0.5]])
        outside = np.array([[1.0, 3.0], [0.0, -1.0]])
        margin, h = max_margin_separator(inside, outside, np.zeros(2))
        assert margin > 0.5
        assert np.all(h @ inside <= -margin) and np.all(h @ outside >= margin)

    def test_xor_has_no_separator(self):
        A = np.array([[1.0, -1.0], [1.0, -1.0]])
        B = np.array([[1.0, -1.0], [-1.0, 1.0]])
        margin, _ = max_margin_separator(A, B, np.zeros(2))
        assert margin <= 0
        # brute force over directions agrees
        for ang in np.linspace(0, 2 * np.pi, 3600, endpoint=False):
            h = np.array([np.cos(ang), np.sin(ang)])
            assert min((-(h @ A)).min(), (h @ B).min()) <= 1e-12


class TestSLSSearch:
    def test_clustered_data_uses_heuristic_order(self):
        ds = gen_clustered(5, 6, 4, 30, 0.5)
        cert = find_sls_certificate(ds)
        stats = class_stats(ds)
        expected = tuple(sorted(range(4), key=lambda j: -stats.mean_dists[j]))
        assert cert.ordering == expected

    def test_certificate_sound(self):
        ds = gen_sls(2, 4, 3, 40)
        cert = find_sls_certificate(ds)
        stats = class_stats(ds)
        for k, j in enumerate(cert.ordering):
            p, h, t, m = cert.base_points[k], cert.normals[k], cert.segment_params[k], cert.margins[k]
            np.testing.assert_allclose(p, t * stats.barycenter + (1 - t) * stats.means[j], atol=1e-14)
            assert m > 0 and cert.theta_min[k] < math.pi
            assert np.all(h @ (ds.classes[j] - p[:, None]) <= -m + 1e-12)
            for i in cert.ordering[k + 1:]:
                assert np.all(h @ (ds.classes[i] - p[:, None]) >= m - 1e-12)
            for q in cert.base_points[:k]:
                assert h @ (q - p) >= m - 1e-12

    def test_xor_not_separable(self):
        # diagonals of a square, one class padded so the means differ
        ds = LabeledDataset((np.array([[1.0, -1.0, 0.5], [1.0, -1.0, 0.5]]),
                             np.array([[1.0, -1.0], [-1.0, 1.0]])))
        with pytest.raises(NotSeparableError) as info:
            find_sls_certificate(ds)
        report = info.value.report
        assert report.attempts
        assert all(a.best_margin < report.min_margin for a in report.attempts)

    def test_reversed_order_rejected(self):
        ds = gen_sls(0, 3, 3, 40)
        cert = find_sls_certificate(ds)
        reverse = tuple(reversed(cert.ordering))
        with pytest.raises(NotSeparableError):
            find_sls_certificate(ds, SearchOptions(orderings=(reverse,)))

    def test_stale_certificate(self):
        ds = gen_sls(0, 3, 3, 30)
        cert = find_sls_certificate(ds)
        verify_sls_certificate(ds, cert)
        other = gen_sls(1, 3, 3, 30)
        with pytest.raises(StaleCertificateError):
            verify_sls_certificate(other, cert)

    def test_certificate_json_round_trip(self):
        ds = gen_sls(0, 3, 3, 30)
        cert = certificate_from_json(certificate_to_json(find_sls_certificate(ds)))
        verify_sls_certificate(ds, cert)


class TestGenerators:
    def test_clustered_deterministic(self):
        a = dataset_to_json(gen_clustered(7, 5, 3, 20, 0.5))
        b = dataset_to_json(gen_clustered(7, 5, 3, 20, 0.5))
        assert a == b
        assert a != dataset_to_json(gen_clustered(8, 5, 3, 20, 0.5))

    def test_spread_controls_delta(self):
        deltas = [class_stats(gen_clustered(1, 5, 3, 50, s)).delta for s in (0.5, 0.05, 0.005)]
        assert deltas[0] > deltas[1] > deltas[2]
        # points lie in a ball of radius spread * spacing / 16 around a centre
        # that need not be the sample mean
        assert deltas[2] <= 2 * 0.005 * 2 / 16

    def test_clustered_argument_checks(self):
        with pytest.raises(InvalidInputError):
            gen_clustered(0, 2, 3, 10, 0.5)
        with pytest.raises(InvalidInputError):
            gen_clustered(0, 5, 3, 10, 1.5)

    def test_sls_properties(self):
        ds = gen_sls(4, 5, 3, 40)
        assert not check_clustered(ds).passes
        find_sls_certificate(ds)
        assert all_certified_orderings(ds) == [(0, 1, 2)]

    def test_sls_more_classes(self):
        ds = gen_sls(0, 6, 5, 20)
        assert ds.class_count == 5
        find_sls_certificate(ds)

    def test_sls_argument_checks(self):
        with pytest.raises(InvalidInputError):
            gen_sls(0, 3, 4, 10)
        assert issubclass(GenerationError, Exception)


class TestJson:
    def test_round_trip(self, rng):
        ds = LabeledDataset((rng.standard_normal((3, 4)), rng.standard_normal((3, 2))), labels=[[1, 2], [3, 4]])
        back = dataset_from_json(dataset_to_json(ds))
        np.testing.assert_array_equal(back.X, ds.X)
        np.testing.assert_array_equal(back.labels, ds.labels)

    def test_default_labels(self):
        ds = dataset_from_json({"ambient_dim": 2, "classes": [{"points": [[1, 0]]}, {"points": [[0, 1]]}]})
        np.testing.assert_array_equal(ds.labels, np.eye(2))

    @pytest.mark.parametrize("doc", [
        [],
        {"classes": []},
        {"ambient_dim": 2, "classes": [{"points": [[1, 0, 0]]}]},
        {"ambient_dim": 2, "classes": [{"label": [1, 0], "points": [[1, 0]]}, {"points": [[0, 1]]}]},
        {"ambient_dim": 2, "classes": [{"points": "x"}]},
    ])
    def test_malformed(self, doc):
        with pytest.raises(SchemaError):
            dataset_from_json(doc)
