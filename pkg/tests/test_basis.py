import random

import pytest

from alcbasis import (
    And,
    BOT,
    DefinableFamily,
    Equiv,
    Exists,
    Forall,
    Interpretation,
    Name,
    Not,
    Or,
    Signature,
    Subsumes,
    TOP,
    build_family,
    check_separation,
    covariety_basis,
    definable_closure,
    entails,
    eval_concept,
    generate_basis,
    minimize,
    minimize_report,
    representative,
    satisfies,
)
from alcbasis.errors import DomainTooLargeError, NotSeparableError
from helpers import (
    definable_subsets_by_enumeration,
    all_concepts_upto_depth,
    nine_axiom_theory,
    random_gci,
    random_interpretation,
    random_separable_interpretation,
)


class TestDefinableClosure:
    def test_example_model_has_four_definable_subsets(self, simpsons):
        fam = definable_closure(simpsons)
        assert set(fam.masks()) == {0, 1, 2, 3}
        assert fam.mode == "closure"

    def test_empty_signature_yields_bottom_and_top(self):
        sig = Signature((), ())
        i = Interpretation.build(sig, ["a", "b"], {}, {})
        fam = definable_closure(i)
        assert fam.witnesses == {0: BOT, 3: TOP}

    def test_every_witness_evaluates_to_its_key(self, small_sig):
        rng = random.Random(3)
        for _ in range(40):
            i = random_interpretation(rng, small_sig, rng.randint(1, 4))
            fam = definable_closure(i)
            for mask, concept in fam.witnesses.items():
                assert eval_concept(concept, i) == mask

    def test_matches_brute_force_enumeration(self, small_sig):
        rng = random.Random(9)
        for _ in range(25):
            i = random_interpretation(rng, small_sig, 3)
            assert set(definable_closure(i).masks()) == definable_subsets_by_enumeration(i)

    def test_matches_unpruned_depth_two_enumeration(self):
        # tiny signature so the raw concept space is enumerable
        sig = Signature(("A",), ("r",))
        rng = random.Random(13)
        for _ in range(10):
            i = random_interpretation(rng, sig, 3)
            depth2 = {eval_concept(c, i) for c in all_concepts_upto_depth(sig, 2)}
            closure = set(definable_closure(i).masks())
            assert depth2 <= closure
            # closure adds nothing a deeper enumeration would not reach
            assert closure == definable_subsets_by_enumeration(i)

    def test_domain_bound(self, small_sig):
        i = Interpretation.build(small_sig, [f"x{k}" for k in range(21)], {}, {})
        with pytest.raises(DomainTooLargeError):
            definable_closure(i)


class TestCheckSeparation:
    def test_example_model_is_separable(self, simpsons):
        assert check_separation(simpsons) is None

    def test_identical_twins_are_inseparable(self, small_sig):
        i = Interpretation.build(
            small_sig, ["a", "b"], {"A": ["a", "b"]}, {"r": [("a", "a"), ("b", "b")]}
        )
        assert check_separation(i) == ("a", "b")

    def test_single_individual_is_separable(self, small_sig):
        i = Interpretation.build(small_sig, ["a"], {}, {})
        assert check_separation(i) is None

    def test_role_domain_difference_separates(self, small_sig):
        i = Interpretation.build(small_sig, ["a", "b"], {}, {"r": [("a", "b")]})
        assert check_separation(i) is None


class TestRepresentative:
    def test_empty_set_is_bottom(self, simpsons):
        assert representative(simpsons, 0) == BOT

    def test_homer_singleton_uses_lexicographically_smallest_name(self, simpsons):
        # Homer's color is {Husband, Male}; Husband wins the tie and already
        # has extension {Homer}, so no distinguishers are needed
        assert representative(simpsons, 1) == Name("Husband")

    def test_marge_singleton(self, simpsons):
        assert representative(simpsons, 2) == Name("Female")

    def test_full_set_is_disjunction_in_carrier_order(self, simpsons):
        assert representative(simpsons, 3) == Or(Name("Husband"), Name("Female"))

    def test_role_separated_individuals(self, small_sig):
        # same (empty) color; only b is in the domain of r
        i = Interpretation.build(small_sig, ["a", "b"], {}, {"r": [("b", "a")]})
        rep_a = representative(i, i.mask_of(["a"]))
        rep_b = representative(i, i.mask_of(["b"]))
        assert eval_concept(rep_a, i) == i.mask_of(["a"])
        assert eval_concept(rep_b, i) == i.mask_of(["b"])

    def test_strictly_nested_colors(self, small_sig):
        # color(b) strictly below color(a): the named difference sits on a's side
        i = Interpretation.build(small_sig, ["a", "b"], {"A": ["a", "b"], "B": ["a"]}, {})
        rep_a = representative(i, i.mask_of(["a"]))
        assert eval_concept(rep_a, i) == i.mask_of(["a"])
        rep_b = representative(i, i.mask_of(["b"]))
        assert eval_concept(rep_b, i) == i.mask_of(["b"])

    def test_no_concept_names(self):
        sig = Signature((), ("r",))
        i = Interpretation.build(sig, ["a", "b"], {}, {"r": [("a", "a")]})
        assert eval_concept(representative(i, i.mask_of(["a"])), i) == i.mask_of(["a"])

    def test_not_separable_raises(self, small_sig):
        i = Interpretation.build(small_sig, ["a", "b"], {}, {})
        with pytest.raises(NotSeparableError):
            representative(i, i.mask_of(["a"]))

    def test_correctness_on_random_separable_models(self):
        # C_S evaluates to S, for every subset of every sampled model
        rng = random.Random(17)
        sig = Signature(("A", "B", "C"), ("r", "s"))
        for _ in range(25):
            i = random_separable_interpretation(rng, sig, max_size=4)
            for s in range(i.full + 1):
                assert eval_concept(representative(i, s), i) == s


def paper_representative_family():
    male, wife = Name("Male"), Name("Wife")
    return DefinableFamily(
        "separating", {0: BOT, 1: male, 2: wife, 3: Or(male, wife)}
    )


class TestGenerateBasis:
    def test_example_with_papers_representatives(self, simpsons):
        report = generate_basis(simpsons, paper_representative_family())
        male, wife = Name("Male"), Name("Wife")
        union = Or(male, wife)
        expected = [
            Equiv(Name("Husband"), male),
            Equiv(Name("Female"), wife),
            Equiv(And(male, wife), BOT),
            Equiv(And(male, union), male),
            Equiv(And(wife, union), wife),
            Equiv(Or(male, union), union),
            Equiv(Or(wife, union), union),
            Equiv(Or(BOT, male), male),
            Equiv(And(BOT, male), BOT),
            Equiv(Not(BOT), union),
            Equiv(Not(male), wife),
            Equiv(Not(wife), male),
            Equiv(Not(union), BOT),
            Equiv(Exists("marriedTo", wife), male),
            Equiv(Forall("marriedTo", wife), male),
            Equiv(Exists("marriedTo", male), wife),
            Equiv(Forall("marriedTo", male), wife),
            Equiv(Exists("marriedTo", BOT), BOT),
            Equiv(Forall("marriedTo", BOT), BOT),
            Equiv(Exists("marriedTo", union), union),
            Equiv(Forall("marriedTo", union), union),
            Subsumes(BOT, male),
            Subsumes(BOT, wife),
            Subsumes(BOT, union),
            Subsumes(male, union),
            Subsumes(wife, union),
        ]
        for gci in expected:
            assert gci in report.raw
        assert all(satisfies(simpsons, g) for g in report.raw)

    def test_trivial_identities_are_skipped(self, simpsons):
        report = generate_basis(simpsons, paper_representative_family())
        assert Equiv(Name("Male"), Name("Male")) not in report.raw
        assert Equiv(Name("Wife"), Name("Wife")) not in report.raw

    def test_two_class_family_without_concept_names(self):
        sig = Signature((), ("r",))
        i = Interpretation.build(sig, ["a"], {}, {"r": []})
        report = generate_basis(i, definable_closure(i))
        assert Equiv(Not(BOT), TOP) in report.raw
        assert Equiv(Exists("r", TOP), BOT) in report.raw
        assert Equiv(Forall("r", BOT), TOP) in report.raw
        assert Subsumes(BOT, TOP) in report.raw
        assert all(satisfies(i, g) for g in report.raw)

    def test_soundness_on_random_models_both_modes(self, small_sig):
        rng = random.Random(19)
        for _ in range(20):
            i = random_interpretation(rng, small_sig, rng.randint(1, 3))
            for mode in ("closure", None):
                try:
                    fam = build_family(i, mode=mode)
                except NotSeparableError:
                    continue
                report = generate_basis(i, fam)
                assert all(satisfies(i, g) for g in report.raw)

    def test_statistics_add_up(self, simpsons):
        report = generate_basis(simpsons, build_family(simpsons))
        s = report.stats
        assert s.raw_count == len(report.raw)
        assert (
            s.kind1_name + s.kind1_binary + s.kind1_complement + s.kind1_quantifier + s.kind2
            == s.raw_count
        )
        assert s.classes == 4
        assert s.mode == "separating"


class TestMinimize:
    def test_empty_theory(self):
        assert minimize(()) == ()

    def test_duplicate_removed(self, small_sig):
        g = Subsumes(Name("A"), Name("B"))
        assert minimize((g, g), sig=small_sig) == (g,)

    def test_tautologies_dropped(self, small_sig):
        g = Subsumes(Name("A"), Name("B"))
        taut = Subsumes(BOT, Name("A"))
        assert minimize((g, taut), sig=small_sig) == (g,)

    def test_example_minimization_equivalent_to_nine_axioms(self, simpsons, family_sig):
        report = minimize_report(
            generate_basis(simpsons, build_family(simpsons)), sig=family_sig
        )
        nine = nine_axiom_theory(family_sig)
        for g in nine:
            assert entails(report.minimized, g, sig=family_sig).verdict == "entailed"
        for g in report.minimized:
            assert entails(nine, g, sig=family_sig).verdict == "entailed"
        assert report.stats.minimized_count == len(report.minimized)
        assert report.stats.eliminated == len(report.raw) - len(report.minimized)

    def test_timeout_keeps_axiom_conservatively(self, small_sig):
        # with no budget every entailment check times out, so nothing is dropped
        g = Subsumes(Name("A"), Name("B"))
        assert minimize((g, g), budget=0, sig=small_sig) == (g, g)

    def test_preserves_entailment_of_sampled_gcis(self, small_sig):
        rng = random.Random(21)
        i = random_interpretation(rng, small_sig, 2)
        report = generate_basis(i, build_family(i))
        small = minimize(report.raw, sig=small_sig)
        for _ in range(25):
            g = random_gci(rng, small_sig, 2)
            before = entails(report.raw, g, sig=small_sig).verdict
            after = entails(small, g, sig=small_sig).verdict
            assert before == after


class TestBasisCompleteness:
    def test_sampled_biconditional_on_small_model(self, small_sig):
        from helpers import random_concept

        rng = random.Random(25)
        i = random_interpretation(rng, small_sig, 2)
        report = generate_basis(i, build_family(i))
        for _ in range(60):
            g = Subsumes(random_concept(rng, small_sig, 2), random_concept(rng, small_sig, 2))
            want = satisfies(i, g)
            got = entails(report.raw, g, sig=small_sig)
            assert got.verdict == ("entailed" if want else "not_entailed")


class TestCovarietyBasis:
    def test_single_component_equivalent_to_model_basis(self, simpsons, family_sig):
        direct = generate_basis(simpsons, build_family(simpsons))
        lifted = covariety_basis([simpsons])
        for g in direct.raw[:20]:
            assert entails(lifted.raw, g, sig=family_sig).verdict == "entailed"
        for g in lifted.raw[:20]:
            assert entails(direct.raw, g, sig=family_sig).verdict == "entailed"

    def test_doubled_component_equivalent_to_model_basis(self, simpsons, family_sig):
        direct = generate_basis(simpsons, build_family(simpsons))
        lifted = covariety_basis([simpsons, simpsons])
        for g in direct.raw[:20]:
            assert entails(lifted.raw, g, sig=family_sig).verdict == "entailed"
        for g in lifted.raw[:20]:
            assert entails(direct.raw, g, sig=family_sig).verdict == "entailed"

    def test_disagreeing_models_lose_the_gci(self, simpsons, family_sig):
        # the second model satisfies Male <= Wife, the example model does not
        agreeable = Interpretation.build(family_sig, ["x"], {}, {})
        report = covariety_basis([simpsons, agreeable])
        g = Subsumes(Name("Male"), Name("Wife"))
        assert not satisfies(simpsons, g)
        assert satisfies(agreeable, g)
        assert entails(report.raw, g, sig=family_sig).verdict == "not_entailed"
