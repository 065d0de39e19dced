import pytest

from conftest import relative_frequency_model
from lexclass import (EmptyDataError, MetricRow, NounSample, class_report,
                      emit_curves, label_intransitive, make_entry,
                      render_class_report, render_lexicon_report,
                      render_lexicon_tsv)


class TestClassReport:
    def test_single_class_frequency_ranking(self, fixture_data):
        model = relative_frequency_model(fixture_data)
        report = class_report(model, fixture_data, 0, top_verbs=3, top_nouns=3)
        assert report.class_prob == 1.0
        # marginals 3/8, 2/8, 3/8: ties keep vocabulary order
        assert [s for s, _ in report.top_verbs] == ["a.as:s", "c.as:s", "b.as:s"]
        assert [s for s, _ in report.top_nouns] == ["x", "z", "y"]
        # observed pairs: (a,x), (b,y), (c,z) -> diagonal in original indices
        seen_pairs = {(report.top_verbs[i][0], report.top_nouns[j][0])
                      for i in range(3) for j in range(3) if report.seen[i, j]}
        assert seen_pairs == {("a.as:s", "x"), ("b.as:s", "y"), ("c.as:s", "z")}

    def test_clamps_to_vocabulary(self, fixture_model, fixture_data):
        report = class_report(fixture_model, fixture_data, 0, top_verbs=99,
                              top_nouns=99)
        assert len(report.top_verbs) == 3
        assert len(report.top_nouns) == 3

    def test_invalid_class_index(self, fixture_model, fixture_data):
        with pytest.raises(IndexError):
            class_report(fixture_model, fixture_data, 2)

    def test_probabilities_match_model(self, fixture_model, fixture_data):
        report = class_report(fixture_model, fixture_data, 1, top_verbs=3,
                              top_nouns=3)
        vocab = fixture_model.vocabulary
        for sym, p in report.top_verbs:
            assert p == fixture_model.verb_given_class[1, vocab.verb_index(sym)]

    def test_rendering_deterministic(self, fixture_model, fixture_data):
        report = class_report(fixture_model, fixture_data, 0)
        assert render_class_report(report) == render_class_report(report)
        text = render_class_report(report)
        assert text.startswith("CLASS 0\nPROB 0.5000\n")
        assert "." in text


class TestEmitCurves:
    def test_rows_and_seed_average(self):
        rows = [MetricRow(5, 10, s, "accuracy", v)
                for s, v in [(1, 0.9), (2, 0.8), (3, 0.7)]]
        text = emit_curves(rows)
        lines = text.splitlines()
        assert lines[0].startswith("#num_classes")
        assert "5\t10\t1\taccuracy\t0.90000000000000002" in lines[1]
        mean_lines = [ln for ln in lines
                      if "\tmean\t" in ln and not ln.startswith("#")]
        assert len(mean_lines) == 1
        fields = mean_lines[0].split("\t")
        assert float(fields[4]) == pytest.approx(0.8)
        assert float(fields[5]) == 0.7
        assert float(fields[6]) == 0.9

    def test_multiple_groups_sorted(self):
        rows = [MetricRow(10, 5, 1, "accuracy", 0.5),
                MetricRow(2, 5, 1, "accuracy", 0.6),
                MetricRow(2, 5, 1, "smoothing_power", 0.9)]
        lines = emit_curves(rows).splitlines()
        mean_lines = [ln for ln in lines
                      if "\tmean\t" in ln and not ln.startswith("#")]
        assert len(mean_lines) == 3
        assert mean_lines[0].startswith("2\t5\tmean\taccuracy")
        assert mean_lines[-1].startswith("10\t5\tmean\taccuracy")

    def test_empty_rejected(self):
        with pytest.raises(EmptyDataError):
            emit_curves([])


class TestLexiconRendering:
    @pytest.fixture
    def entry(self, fixture_model):
        sample = NounSample("wobble", {"x": 3.0, "y": 1.0})
        labeling = label_intransitive(fixture_model, sample, iterations=10)
        return make_entry(fixture_model, labeling, sample, top_k=2)

    def test_tsv_format(self, entry):
        lines = render_lexicon_tsv([entry]).splitlines()
        assert lines[0] == "#verb\tslot\tlabel\tprob\tfillers"
        fields = lines[1].split("\t")
        assert fields[0] == "wobble"
        assert fields[1] == "as:s"
        assert fields[2] in {"0", "1"}
        assert 0.0 <= float(fields[3]) <= 1.0
        assert ";" in fields[4] and ":" in fields[4]

    def test_report_format(self, entry):
        text = render_lexicon_report([entry])
        assert text.startswith("wobble  as:s  class ")
        assert text.count("\n") >= 3

    def test_empty_entries(self):
        assert render_lexicon_report([]) == ""
        assert render_lexicon_tsv([]).splitlines() == ["#verb\tslot\tlabel\tprob\tfillers"]
