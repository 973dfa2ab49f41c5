"""Loss spec mini-language: parsing, dimension resolution, round trips."""

import numpy as np
import pytest

import lossgeom as lg
from lossgeom.specs import SpecError, build_loss, loss_from_text, parse_loss_spec


@pytest.mark.parametrize(
    "text,name",
    [
        ("log", "log"),
        ("LOG", "log"),
        ("brier", "brier"),
        ("zeroone", "zeroone"),
        ("const", "const"),
        ("cnorm:a=-1", "cnorm:a=-1"),
        ("cd:a=1,1", "cd:a=1,1"),
        ("normloss:alpha=2", "normloss:alpha=2"),
    ],
)
def test_family_specs_build(text, name):
    loss = loss_from_text(text)
    assert loss.name == name
    assert loss.n == 2


def test_dimension_from_spec_parameter():
    assert loss_from_text("log:n=3").n == 3
    assert loss_from_text("cnorm:a=-1,n=4").n == 4


def test_dimension_from_context():
    assert loss_from_text("brier", n=3).n == 3


def test_cd_dimension_comes_from_parameter_vector():
    loss = loss_from_text("cd:a=1,2,3")
    assert loss.n == 3
    with pytest.raises(ValueError):
        loss_from_text("cd:a=1,1", n=3)


def test_sentinel_values():
    assert loss_from_text("cnorm:a=-inf").name == "const"
    assert loss_from_text("normloss:alpha=inf").n == 2


def test_msum_spec_builds():
    loss = loss_from_text("msum:combiner=const;parts=log,brier", n=2)
    p = np.array([0.3, 0.7])
    expected = lg.log_loss(2).loss(p) + lg.brier_loss(2).loss(p)
    np.testing.assert_allclose(loss.loss(p), expected, atol=1e-12)


def test_msum_dual_mode():
    loss = loss_from_text("msum:combiner=zeroone;parts=log,log;mode=dual", n=2)
    p = np.array([0.3, 0.7])
    assert float(loss.rho(p)) == pytest.approx(
        0.5 * float(lg.log_loss(2).rho(p)), abs=1e-5
    )


def test_msum_with_vector_valued_part_parameter():
    # the comma inside cd:a=1,1 must not split the parts list
    loss = loss_from_text("msum:combiner=const;parts=cd:a=1,1,log", n=2)
    p = np.array([0.4, 0.6])
    expected = lg.cobb_douglas_loss([1, 1]).loss(p) + lg.log_loss(2).loss(p)
    np.testing.assert_allclose(loss.loss(p), expected, atol=1e-12)


def test_resolved_specs_reparse_to_equivalent_losses(rng):
    texts = [
        "log",
        "cnorm:a=0.75",
        "cd:a=2,1",
        "normloss:alpha=1.5",
        "msum:combiner=const;parts=log,brier",
    ]
    p = np.array([0.35, 0.65])
    for text in texts:
        spec = parse_loss_spec(text)
        loss = build_loss(spec, 2)
        rebuilt = loss_from_text(spec.resolved(2), 2)
        np.testing.assert_allclose(rebuilt.loss(p), loss.loss(p), atol=1e-12)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "nosuch",
        "cnorm",  # missing a
        "cnorm:a=0",  # forbidden exponent (raised at build)
        "cnorm:b=1",
        "log:n=1",
        "normloss:alpha=0.5",
        "msum:parts=log,brier",  # no combiner
        "msum:combiner=const;parts=log",  # one part
        "msum:combiner=const;parts=log,brier;mode=sideways",
        "msum:combiner=msum:combiner=const;parts=log,log;parts=log,log",
    ],
)
def test_malformed_specs_rejected(text):
    with pytest.raises(ValueError):
        loss_from_text(text)


def test_spec_error_carries_position():
    try:
        parse_loss_spec("cnorm:a=x")
    except SpecError as err:
        assert err.position > 0
        assert "^" in str(err)
    else:
        raise AssertionError("expected SpecError")
