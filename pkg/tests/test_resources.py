import pytest

from textcontours.resources import (
    ResourceError,
    load_lexicon,
    load_store,
    lookup_ngram,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def tiny_dir(tmp_path):
    write(tmp_path / "lex.tsv",
          "happy\tjoy\t1.0\nsad\tsorrow\t0.8\nglad\tjoy\t0.5\n")
    write(tmp_path / "norm.tsv", "happy\t4.2\nsad\t3.1\n")
    write(tmp_path / "list.txt", "alpha\nbeta\n")
    write(tmp_path / "toy_spoken.2.tsv", "of the\t1\t5.5\nin a\t2\t5.1\n")
    write(tmp_path / "manifest.tsv",
          "lexicon\tlex\tlex.tsv\n"
          "norm\tnorm\tnorm.tsv\n"
          "wordlist\tlist\tlist.txt\n"
          "freq\tsp2\ttoy_spoken.2.tsv\n")
    return tmp_path


class TestLoadStore:
    def test_round_trip_counts(self, tiny_dir):
        store = load_store(str(tiny_dir / "manifest.tsv"))
        assert len(store.lexicons) == 1
        lex = store.lexicons[0]
        assert lex.subcategories == ("joy", "sorrow")
        assert len(lex.entries) == 3
        assert store.summary()["lexicons"]["lex"]["entries"] == 3

    def test_missing_file_named(self, tiny_dir):
        manifest = write(tiny_dir / "bad.tsv", "lexicon\tmissing\tnot_there.tsv\n")
        with pytest.raises(ResourceError, match="not_there.tsv"):
            load_store(manifest)

    def test_duplicate_name_rejected(self, tiny_dir):
        manifest = write(tiny_dir / "dup.tsv",
                         "lexicon\tlex\tlex.tsv\nlexicon\tlex\tlex.tsv\n")
        with pytest.raises(ResourceError, match="duplicate"):
            load_store(manifest)

    def test_malformed_line_reports_position(self, tiny_dir):
        write(tiny_dir / "broken.tsv", "happy\tjoy\t1.0\nnot-enough-columns\n")
        manifest = write(tiny_dir / "m2.tsv", "lexicon\tbad\tbroken.tsv\n")
        with pytest.raises(ResourceError, match=r"broken\.tsv:2"):
            load_store(manifest)

    def test_order_independence(self, tiny_dir):
        base = (tiny_dir / "manifest.tsv").read_text().strip().splitlines()
        permuted = write(tiny_dir / "perm.tsv", "\n".join(reversed(base)) + "\n")
        a = load_store(str(tiny_dir / "manifest.tsv"))
        b = load_store(permuted)
        assert [lx.name for lx in a.lexicons] == [lx.name for lx in b.lexicons]
        assert a.lexicons[0].entries == b.lexicons[0].entries
        assert a.wordlists == b.wordlists
        assert [t.entries for t in a.freq_tables] == [t.entries for t in b.freq_tables]

    def test_unknown_kind_rejected(self, tiny_dir):
        manifest = write(tiny_dir / "m3.tsv", "mystery\tx\tlex.tsv\n")
        with pytest.raises(ResourceError, match="unknown resource kind"):
            load_store(manifest)


class TestLexiconLookup:
    def test_case_insensitive(self, tiny_dir):
        store = load_store(str(tiny_dir / "manifest.tsv"))
        lex = store.lexicons[0]
        assert lex.lookup("HAPPY") == {"joy": 1.0}
        assert lex.lookup("Happy") == lex.lookup("happy")

    def test_wildcard_after_exact_and_longest_prefix(self, tmp_path):
        path = write(tmp_path / "w.tsv",
                     "happ*\tjoy\t0.5\nhappier\tjoy\t0.9\nha*\tjoy\t0.1\n")
        lex = load_lexicon("w", path)
        assert lex.lookup("happier") == {"joy": 0.9}   # exact wins
        assert lex.lookup("happily") == {"joy": 0.5}   # longest prefix
        assert lex.lookup("hat") == {"joy": 0.1}
        assert lex.lookup("zebra") is None


class TestNgramLookup:
    def test_hit_and_absent(self, tiny_dir):
        store = load_store(str(tiny_dir / "manifest.tsv"))
        table = store.freq_tables[0]
        assert table.register == "spoken" and table.n == 2
        assert lookup_ngram(table, ["of", "the"]) == (1, 5.5)
        assert lookup_ngram(table, ["OF", "THE"]) == (1, 5.5)
        assert lookup_ngram(table, ["on", "the"]) is None

    def test_wrong_length_rejected(self, tiny_dir):
        store = load_store(str(tiny_dir / "manifest.tsv"))
        with pytest.raises(ResourceError, match="2-gram"):
            lookup_ngram(store.freq_tables[0], ["a", "b", "c"])

    def test_wrong_gram_arity_in_file(self, tmp_path):
        write(tmp_path / "toy_news.2.tsv", "single\t1\t2.0\n")
        manifest = write(tmp_path / "m.tsv", "freq\tn2\ttoy_news.2.tsv\n")
        with pytest.raises(ResourceError, match="wrong token count"):
            load_store(manifest)

    def test_filename_must_encode_n(self, tmp_path):
        write(tmp_path / "badname.tsv", "a\t1\t2.0\n")
        manifest = write(tmp_path / "m.tsv", "freq\tx\tbadname.tsv\n")
        with pytest.raises(ResourceError, match="does not encode n"):
            load_store(manifest)
