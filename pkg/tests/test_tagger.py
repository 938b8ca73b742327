import numpy as np
import pytest

from gujmorph import nn, paradigm, tagset
from gujmorph.errors import BundleNotRegistered, DataError, EmptyTrainingSet
from gujmorph.script import build_vocab
from gujmorph.tagger import (
    ambiguity_audit,
    model_registry,
    predict_bundle,
    train_tagger,
)
from gujmorph.tagset import make_bundle, register_all


def _noun_corpus(n_roots=6, seed=0):
    roots = paradigm.random_roots(n_roots, seed=seed)
    records = paradigm.gen_nouns(roots, paradigm.assign_genders(roots))
    return records, register_all(records)


@pytest.fixture(scope="module")
def single_word_model():
    records = [
        r for r in paradigm.gen_nouns(["સવાર"], {"સવાર": "F"})
    ]
    registry = register_all(records)
    hyper = nn.Hyper(epochs=200, seed=0, embed_dim=8, hidden_dim=16)
    model, _ = train_tagger(records, "N", registry, hyper)
    return model, records, registry


def test_train_empty_raises():
    _, registry = _noun_corpus()
    with pytest.raises(EmptyTrainingSet):
        train_tagger([], "N", registry, nn.Hyper(epochs=1))


def test_mixed_pos_rejected():
    records, registry = _noun_corpus()
    verbs = paradigm.gen_verbs(["રમ"])
    for record in verbs:
        registry.register(record.bundle)
    with pytest.raises(DataError):
        train_tagger(records + verbs, "N", registry, nn.Hyper(epochs=1))


def test_unregistered_bundle_rejected():
    records, _ = _noun_corpus()
    empty_registry = tagset.ClassRegistry()
    with pytest.raises(BundleNotRegistered):
        train_tagger(records, "N", empty_registry, nn.Hyper(epochs=1))


def test_training_deterministic():
    records, registry = _noun_corpus(3)
    hyper = nn.Hyper(epochs=4, seed=5)
    a, _ = train_tagger(records, "N", registry, hyper)
    b, _ = train_tagger(records, "N", registry, hyper)
    for name in nn.TENSOR_ORDER:
        assert np.array_equal(a.tensors[name], b.tensors[name])


def test_overfit_single_root_paradigm(single_word_model):
    model, records, _ = single_word_model
    for record in records:
        bundle, dist = predict_bundle(model, record.surface)
        assert bundle == record.bundle
        assert abs(dist.sum() - 1.0) < 1e-9


def test_prediction_within_registry_range(single_word_model):
    model, _, registry = single_word_model
    bundle, dist = predict_bundle(model, "કઠપ")
    assert len(dist) == registry.n_classes("N")
    assert tagset.canonicalize(bundle) in registry.classes("N")


def test_zero_weight_model_predicts_class_zero():
    vocab = build_vocab(["abc"])
    classes = ["N;M;SG;NOM", "N;F;SG;LOC", "N;N;PL;GEN"]
    model = nn.init_params(
        "class", vocab, nn.Hyper(embed_dim=3, hidden_dim=4), classes=classes
    )
    for name in nn.TENSOR_ORDER:
        model.tensors[name][:] = 0.0
    bundle, dist = predict_bundle(model, "abc")
    assert np.allclose(dist, 1.0 / 3.0)
    assert tagset.canonicalize(bundle) == classes[0]  # tie breaks to lowest id


def test_argmax_shift_invariant(single_word_model):
    model, records, _ = single_word_model
    before = [predict_bundle(model, r.surface)[0] for r in records]
    model.tensors["head.b"][:] += 3.25
    after = [predict_bundle(model, r.surface)[0] for r in records]
    assert before == after
    model.tensors["head.b"][:] -= 3.25


def test_model_registry_round_trip(single_word_model):
    model, _, registry = single_word_model
    rebuilt = model_registry(model)
    assert rebuilt.classes("N") == registry.classes("N")


# -------------------------------------------------------- ambiguity audit


def test_audit_clean_corpus_ceiling_one():
    records, _ = _noun_corpus()
    report = ambiguity_audit(records)
    assert report.ceiling == 1.0
    assert report.conflicted_surfaces == ()


def test_audit_duplicate_surfaces():
    # the default verb grid carries two surface ambiguities per root
    records = paradigm.gen_verbs(["રમ"])
    report = ambiguity_audit(records)
    assert report.n_total == 8
    assert report.n_resolvable == 6
    assert report.ceiling == pytest.approx(0.75)
    assert "રમતો" in report.conflicted_surfaces
    assert "રમતી" in report.conflicted_surfaces


def test_audit_counts_by_majority():
    bundle_a = make_bundle("N", ["M", "SG", "NOM"])
    bundle_b = make_bundle("N", ["F", "SG", "NOM"])
    from gujmorph.corpus import Record

    records = [
        Record(surface="ઘર", lemma="ઘર", pos="N", bundle=bundle_a),
        Record(surface="ઘર", lemma="ઘર", pos="N", bundle=bundle_a),
        Record(surface="ઘર", lemma="ઘર", pos="N", bundle=bundle_b),
    ]
    report = ambiguity_audit(records)
    assert report.n_resolvable == 2
    assert report.ceiling == pytest.approx(2 / 3)


def test_measured_accuracy_cannot_exceed_ceiling():
    roots = ["રમ", "કર", "ચલ"]
    records = paradigm.gen_verbs(roots)
    registry = register_all(records)
    hyper = nn.Hyper(epochs=150, seed=0, embed_dim=16, hidden_dim=32)
    model, _ = train_tagger(records, "V", registry, hyper)
    correct = sum(
        1 for r in records if predict_bundle(model, r.surface)[0] == r.bundle
    )
    report = ambiguity_audit(records)
    assert correct / len(records) <= report.ceiling + 1e-12
