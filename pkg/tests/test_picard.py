from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starmod.core.errors import (
    DimensionMismatchError,
    InconsistencyError,
    PreconditionError,
    UnsupportedOperationError,
)
from starmod.core.picard import (
    CharacteristicClass,
    CohomologyModel,
    DiffeoAction,
    OutEquivElement,
    Witness,
    compose_witnesses,
    invert_witness,
    kernel_description,
    morita_check,
    outequiv_compose,
    outequiv_identity,
    outequiv_inverse,
    outequiv_normal_form,
    verify_witness,
)
from starmod.core.scalars import GaussianRational

SWAP = ((0, 1), (1, 0))
ID2 = ((1, 0), (0, 1))


@pytest.fixture
def torus_model():
    return CohomologyModel(d1=2, d2=1, omega=(1,), actions=[DiffeoAction("id", ID2, ((1,),))])


@pytest.fixture
def swap_model():
    return CohomologyModel(
        d1=2,
        d2=2,
        omega=(1, 2),
        actions=[DiffeoAction("id", ID2, ID2), DiffeoAction("swap", ID2, SWAP)],
    )


def _class(model, *orders):
    return CharacteristicClass.from_model(model, orders)


def test_reflexive(torus_model):
    c = _class(torus_model, (Fraction(1, 3),), (5,))
    report = morita_check(c, c, torus_model)
    assert report.equivalent
    assert report.witness == Witness("id", (0,))


@pytest.mark.parametrize("difference, equivalent", [
    (-2, True),
    (Fraction(-1, 2), False),
    (0, True),
    (Fraction(1, 2), False),
    (3, True),
])
def test_order_zero_difference(torus_model, difference, equivalent):
    c = _class(torus_model, (Fraction(1, 5),), (1,), (2,))
    c_prime = _class(torus_model, (Fraction(1, 5) + difference,), (1,), (2,))
    report = morita_check(c, c_prime, torus_model)
    assert report.equivalent is equivalent
    if equivalent:
        assert report.witness == Witness("id", (int(difference),))
    else:
        assert report.witness is None


def test_imaginary_difference_rejected(torus_model):
    c = _class(torus_model, (0,))
    c_prime = _class(torus_model, (GaussianRational(1, 1),))
    assert not morita_check(c, c_prime, torus_model).equivalent


def test_higher_orders_must_match(torus_model):
    c = _class(torus_model, (0,), (1,))
    c_prime = _class(torus_model, (0,), (2,))
    assert not morita_check(c, c_prime, torus_model).equivalent


def test_swap_witness(swap_model):
    c = _class(swap_model, (0, 0))
    swapped = CharacteristicClass(tuple(reversed(c.leading)), ((0, 0),))
    report = morita_check(c, swapped, swap_model)
    assert report.equivalent
    assert report.witness.action == "swap"
    without_swap = CohomologyModel(d1=2, d2=2, omega=(1, 2), actions=[DiffeoAction("id", ID2, ID2)])
    assert not morita_check(c, swapped, without_swap).equivalent


def test_dimension_mismatch(torus_model, swap_model):
    with pytest.raises(DimensionMismatchError):
        morita_check(_class(torus_model, (0,)), _class(swap_model, (0, 0)), torus_model)
    with pytest.raises(DimensionMismatchError):
        morita_check(_class(torus_model, (0,)), _class(torus_model, (0,), (0,)), torus_model)


def test_identity_action_inserted():
    model = CohomologyModel(d1=1, d2=1, omega=(1,), actions=[DiffeoAction("flip", ((-1,),), ((1,),))])
    assert model.actions[0].name == "id"
    assert model.find_action(((1,),), ((1,),)).name == "id"


def test_non_unimodular_action_rejected():
    with pytest.raises(PreconditionError):
        DiffeoAction("double", ((2,),), ((1,),))


def test_compose_identity_witnesses(torus_model):
    c = _class(torus_model, (0,))
    c1 = _class(torus_model, (3,))
    c2 = _class(torus_model, (0,))
    w1 = morita_check(c, c1, torus_model).witness
    w2 = morita_check(c1, c2, torus_model).witness
    assert w1 == Witness("id", (3,))
    assert w2 == Witness("id", (-3,))
    assert compose_witnesses(w1, w2, torus_model, (c, c1, c2)) == Witness("id", (0,))


def test_compose_swap_witnesses(swap_model):
    c = _class(swap_model, (0, 0))
    swapped = CharacteristicClass(tuple(reversed(c.leading)), ((0, 0),))
    w1 = morita_check(c, swapped, swap_model).witness
    w2 = morita_check(swapped, c, swap_model).witness
    composed = compose_witnesses(w1, w2, swap_model, (c, swapped, c))
    assert composed == Witness("id", (0, 0))
    assert morita_check(c, c, swap_model).witness == composed


def test_compose_with_shifted_classes(swap_model):
    c = _class(swap_model, (0, 0))
    c1 = CharacteristicClass(tuple(reversed(c.leading)), ((1, 0),))
    c2 = CharacteristicClass(c.leading, ((Fraction(1, 2), 7),))
    w1 = morita_check(c, c1, swap_model).witness
    assert morita_check(c1, c2, swap_model).equivalent is False
    c2 = CharacteristicClass(c.leading, ((2, 5),))
    w2 = morita_check(c1, c2, swap_model).witness
    composed = compose_witnesses(w1, w2, swap_model, (c, c1, c2))
    assert verify_witness(composed, c, c2, swap_model)
    assert composed.action == "id"


def test_compose_rejects_invalid_input(torus_model):
    c = _class(torus_model, (0,))
    c1 = _class(torus_model, (1,))
    with pytest.raises(InconsistencyError):
        compose_witnesses(Witness("id", (5,)), Witness("id", (0,)), torus_model, (c, c1, c1))


def test_compose_needs_composite_action():
    restricted = CohomologyModel(
        d1=1, d2=1, omega=(0,),
        actions=[DiffeoAction("id", ((1,),), ((1,),)), DiffeoAction("rot", ((-1,),), ((1,),)),
                 DiffeoAction("flip", ((1,),), ((-1,),))],
    )
    flip = Witness("flip", (0,))
    rot = Witness("rot", (0,))
    zero_class = CharacteristicClass((0,), ((0,),))
    with pytest.raises(PreconditionError):
        compose_witnesses(rot, flip, restricted, (zero_class, zero_class, zero_class))


def test_invert_witness(swap_model):
    c = _class(swap_model, (0, 0))
    c1 = CharacteristicClass(tuple(reversed(c.leading)), ((3, -1),))
    w = morita_check(c, c1, swap_model).witness
    back = invert_witness(w, swap_model, (c, c1))
    assert verify_witness(back, c1, c, swap_model)
    assert back.action == "swap"


# OutEquiv


def test_normal_form_example():
    e = OutEquivElement((Fraction(5, 2), Fraction(-1, 3)))
    assert outequiv_normal_form(e).v0 == (GaussianRational(Fraction(1, 2)), GaussianRational(Fraction(2, 3)))


def test_normal_form_keeps_imaginary_part():
    e = OutEquivElement((GaussianRational(Fraction(7, 4), 2),))
    assert outequiv_normal_form(e).v0 == (GaussianRational(Fraction(3, 4), 2),)


def test_two_torsion():
    half = OutEquivElement((Fraction(1, 2), 0))
    assert outequiv_compose(half, half) == outequiv_identity(2, 0)


def test_non_symplectic_rejected():
    model = CohomologyModel(d1=1, d2=1, omega=(1,), symplectic=False)
    e = OutEquivElement((0,))
    with pytest.raises(UnsupportedOperationError):
        outequiv_compose(e, e, model)
    with pytest.raises(UnsupportedOperationError):
        kernel_description(model, 2)


rational = st.fractions(min_value=-5, max_value=5, max_denominator=12)
scalar = st.builds(GaussianRational, rational, rational)


@st.composite
def outequiv_triples(draw):
    d1 = draw(st.integers(min_value=1, max_value=3))
    K = draw(st.integers(min_value=0, max_value=4))

    def one():
        v0 = tuple(draw(scalar) for _ in range(d1))
        higher = tuple(tuple(draw(scalar) for _ in range(d1)) for _ in range(K))
        return OutEquivElement(v0, higher)

    return one(), one(), one()


@settings(max_examples=50)
@given(outequiv_triples())
def test_outequiv_group_axioms(triple):
    a, b, c = triple
    identity = outequiv_identity(a.d1, a.order)
    assert outequiv_compose(outequiv_compose(a, b), c) == outequiv_compose(a, outequiv_compose(b, c))
    assert outequiv_compose(a, b) == outequiv_compose(b, a)
    assert outequiv_compose(a, identity) == outequiv_normal_form(a)
    assert outequiv_compose(a, outequiv_inverse(a)) == identity
    assert outequiv_normal_form(outequiv_normal_form(a)) == outequiv_normal_form(a)


@pytest.mark.parametrize("d1, K, torus_dimension, layers", [(2, 3, 2, (2, 2, 2)), (0, 2, 0, (0, 0)), (1, 0, 1, ())])
def test_kernel_description(d1, K, torus_dimension, layers):
    model = CohomologyModel(d1=d1, d2=1, omega=(1,))
    description = kernel_description(model, K)
    assert description.torus_dimension == torus_dimension
    assert description.free_layers == layers
    assert description.generator_count == d1 * (K + 1)
    assert description.trivial is (d1 == 0)
