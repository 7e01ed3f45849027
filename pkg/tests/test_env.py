import pytest

from pts_kernel.env import (
    Decl,
    Def,
    GlobalEnv,
    MetaArg,
    Pattern,
    add_entry,
    match_pattern,
    unfold_all,
)
from pts_kernel.errors import (
    DuplicateNameError,
    IllFormedPatternError,
    TypeCheckError,
)
from pts_kernel.parser import build_rewrite, elaborate, parse_term_surface
from pts_kernel.specs import LAMBDA_HOL
from pts_kernel.terms import BOX_T, Const, Let, Var, alpha_eq


def _term(src, env, **kw):
    return elaborate(parse_term_surface(src), env, **kw)


def test_add_parametric_power_set_definition_to_hol_base():
    env = GlobalEnv(LAMBDA_HOL)
    ty = _term("# -> #", env)
    body = _term("fun (X : #) => X -> *", env)
    out = add_entry(env, Def("Pow", ty, body))
    assert "Pow" in out
    assert out.lookup("Pow").body == body


def test_add_retract_rewrite_to_simple_env(simple):
    # The simple bundle already carries the rule; adding a copy under a fresh
    # name must typecheck the same way.
    rule = build_rewrite(
        simple.env,
        "retract2",
        parse_term_surface("match (intro $u)"),
        parse_term_surface("$u"),
    )
    out = add_entry(simple.env, rule)
    assert out.rules_for("match")[-1].name == "retract2"


def test_add_decl_needing_missing_rule_fails():
    env = GlobalEnv(LAMBDA_HOL)
    ty = _term("Pi (X : #) -> X", env)
    with pytest.raises(TypeCheckError) as err:
        add_entry(env, Decl("bad", ty))
    assert err.value.kind == "NoRule"
    assert err.value.rule_pair == ("##", "#")


def test_duplicate_names_rejected(simple):
    with pytest.raises(DuplicateNameError):
        add_entry(simple.env, Decl("A", BOX_T))


def test_lookup_finds_entries(simple, reynolds):
    intro = reynolds.env.lookup("intro")
    assert isinstance(intro, Def)
    assert alpha_eq(intro.type, _term("T A -> A", reynolds.env))
    a = simple.env.lookup("A")
    assert isinstance(a, Decl)
    assert a.type == BOX_T


def test_lookup_unknown_constant():
    env = GlobalEnv(LAMBDA_HOL)
    with pytest.raises(TypeCheckError) as err:
        env.lookup("x")
    assert err.value.kind == "UnknownConstant"


def test_match_pattern_binds_metavariable(simple):
    pattern = simple.env.rules_for("match")[0].lhs
    t = _term("match (intro X₀)", simple.env)
    sigma = match_pattern(pattern, t)
    assert sigma is not None
    assert sigma[0] == Const("X₀")


def test_match_pattern_is_purely_structural(simple):
    pattern = simple.env.rules_for("match")[0].lhs
    folded = _term("match x₀", simple.env)  # x₀ unfolds to intro X₀, but not here
    assert match_pattern(pattern, folded) is None


def test_match_pattern_requires_head_constant(simple):
    pattern = simple.env.rules_for("match")[0].lhs
    assert match_pattern(pattern, _term("intro X₀", simple.env)) is None


def test_left_linearity_enforced():
    p = Pattern("match", (MetaArg(0, "u"), MetaArg(0, "u")))
    with pytest.raises(IllFormedPatternError):
        p.validate()


def test_rewrite_head_must_be_declared(simple):
    with pytest.raises(IllFormedPatternError):
        build_rewrite(
            simple.env,
            "bad",
            parse_term_surface("p₀ $u"),  # p₀ is defined, not declared
            parse_term_surface("$u"),
        )


def test_extension_is_monotone(simple):
    from pts_kernel.typecheck import check

    extended = add_entry(simple.env, Decl("extra", BOX_T))
    check(extended, simple.key_terms["bottomProof"], simple.expected_types["bottomProof"])


def test_unfold_all_idempotent_on_key_terms(all_bundles):
    for bundle in all_bundles:
        for t in bundle.key_terms.values():
            once = unfold_all(bundle.env, t)
            assert alpha_eq(once, unfold_all(bundle.env, once))


def test_unfold_all_keeps_declared_constants(simple):
    t = unfold_all(simple.env, Const("A"))
    assert t == Const("A")


def test_unfold_all_expands_let():
    env = GlobalEnv(LAMBDA_HOL)
    t = Let("x", BOX_T, Const("c"), Var(0, "x"))
    env = add_entry(env, Decl("c", BOX_T))
    assert unfold_all(env, t) == Const("c")


def test_unfold_all_unknown_constant():
    env = GlobalEnv(LAMBDA_HOL)
    with pytest.raises(TypeCheckError):
        unfold_all(env, Const("mystery"))
