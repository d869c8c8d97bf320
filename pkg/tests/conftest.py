import json

import pytest

from hypspec.curves import geodesic_rep
from hypspec.surface import build_surface, reference_fn


@pytest.fixture(scope="session")
def ref():
    return build_surface(reference_fn())


@pytest.fixture(scope="session")
def full_twist():
    fn = reference_fn()
    return build_surface(fn.with_twist(0, fn.twists[0] + fn.lengths[0]))


@pytest.fixture(scope="session")
def perturbed():
    return build_surface(reference_fn().with_length(0, 2.05))


@pytest.fixture(scope="session")
def g0(ref):
    return geodesic_rep(ref, "b2")


@pytest.fixture(scope="session")
def a1(ref):
    return geodesic_rep(ref, "a1")


@pytest.fixture(scope="session")
def special(ref, g0):
    from hypspec.reconstruct import construct_special_pants
    return construct_special_pants(ref, g0)


@pytest.fixture(scope="session")
def spec_file(tmp_path_factory):
    from hypspec.cli import reference_spec
    p = tmp_path_factory.mktemp("spec") / "ref.json"
    p.write_text(json.dumps(reference_spec()))
    return p
