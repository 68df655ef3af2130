import io

import pytest

from latticetn.cli import main
from latticetn.config import Config, load_config
from latticetn.errors import ConfigError


def test_config_defaults_valid():
    Config().validate()


def test_config_file_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment\nd_model = 32\nn_heads=4\nlearning_rate = 0.01\n"
        "scale_attention = false\npooling = max\n",
        encoding="utf-8",
    )
    config = load_config(path)
    assert config.d_model == 32
    assert config.n_heads == 4
    assert config.learning_rate == 0.01
    assert config.scale_attention is False
    assert config.pooling == "max"
    assert config.epochs == 5  # untouched default


def test_config_file_unknown_key(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("d_mode = 32\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="d_mode"):
        load_config(path)


def test_config_file_bad_value(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("epochs = soon\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="epochs"):
        load_config(path)


def test_validation_reports_all_problems_at_once():
    config = Config(d_model=30, n_heads=4, epochs=-1, pooling="avg")
    with pytest.raises(ConfigError) as err:
        config.validate()
    message = str(err.value)
    assert "n_heads" in message
    assert "epochs" in message
    assert "pooling" in message


def test_cli_flag_overrides_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("epochs = 9\nd_model = 32\n", encoding="utf-8")
    # lattice command parses config layers but needs no corpus
    code = main(["lattice", "--config", str(cfg), "学习"])
    assert code == 0


def test_cli_usage_error_exit_code(capsys):
    assert main(["train", "--epochs", "three", "--synthetic", "5"]) == 1
    assert main(["bogus-command"]) == 1


def test_cli_missing_lexicon_is_config_error(tmp_path, capsys):
    code = main(
        ["train", "--synthetic", "5", "--lexicon", str(tmp_path / "absent.txt")]
    )
    assert code == 1
    assert "lexicon" in capsys.readouterr().err


def test_cli_missing_corpus_is_data_error(tmp_path, capsys):
    code = main(["train", "--corpus", str(tmp_path / "absent.tsv")])
    assert code == 1  # path checked during config validation
    code = main(["train"])
    assert code == 1  # neither corpus nor synthetic size given


def test_cli_lattice_dump(capsys):
    code = main(["lattice", "学习", "--distances"])
    assert code == 0
    out = capsys.readouterr().out
    assert "L'=3" in out
    assert "学习" in out
    for name in ("hh:", "ht:", "th:", "tt:"):
        assert name in out


def test_cli_lattice_characters_only(tmp_path, capsys):
    empty_lex = tmp_path / "lex.txt"
    empty_lex.write_text("", encoding="utf-8")
    empty_rules = tmp_path / "r.rules"
    empty_rules.write_text("", encoding="utf-8")
    code = main(
        ["lattice", "学习", "--lexicon", str(empty_lex), "--rules", str(empty_rules)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "L'=2" in out


def test_cli_train_epochs_zero_saves_initial_checkpoint(tmp_path, capsys):
    ckpt = tmp_path / "m.npz"
    code = main(
        ["train", "--synthetic", "30", "--epochs", "0", "--checkpoint", str(ckpt), "--seed", "5"]
    )
    assert code == 0
    assert ckpt.exists()
    out = capsys.readouterr().out
    assert "saved checkpoint" in out
    assert not [l for l in out.splitlines() if l.startswith("epoch ")]  # no training ran


def test_cli_eval_and_normalize_round_trip(tmp_path, capsys, monkeypatch):
    ckpt = tmp_path / "m.npz"
    assert main(
        ["train", "--synthetic", "60", "--epochs", "1", "--checkpoint", str(ckpt), "--seed", "5"]
    ) == 0
    capsys.readouterr()

    assert main(
        ["eval", "--synthetic", "60", "--checkpoint", str(ckpt), "--seed", "5", "--split", "test"]
    ) == 0
    out = capsys.readouterr().out
    assert "token accuracy" in out

    assert main(
        ["eval", "--synthetic", "60", "--checkpoint", str(ckpt), "--seed", "5", "--json"]
    ) == 0
    assert '"token_accuracy"' in capsys.readouterr().out

    monkeypatch.setattr("sys.stdin", io.StringIO("你好\n\n"))
    assert main(["normalize", "--checkpoint", str(ckpt)]) == 0
    lines = capsys.readouterr().out.split("\n")
    assert lines[1] == ""  # empty line in, empty line out


def test_cli_eval_empty_split_is_data_error(tmp_path, capsys):
    ckpt = tmp_path / "m.npz"
    corpus = tmp_path / "c.tsv"
    corpus.write_text("你\tO\n", encoding="utf-8")
    assert main(
        ["train", "--synthetic", "30", "--epochs", "0", "--checkpoint", str(ckpt)]
    ) == 0
    code = main(["eval", "--corpus", str(corpus), "--checkpoint", str(ckpt), "--split", "test"])
    assert code == 2
    assert "empty" in capsys.readouterr().err


def test_cli_numeric_failure_exit_code(tmp_path, capsys, monkeypatch):
    import numpy as np

    ckpt = tmp_path / "m.npz"
    assert main(
        ["train", "--synthetic", "30", "--epochs", "0", "--checkpoint", str(ckpt)]
    ) == 0
    capsys.readouterr()
    # poison one weight so the encoder produces non-finite values
    data = dict(np.load(ckpt, allow_pickle=False))
    data["encoder.layers.0.ff1.weight"] = np.full_like(
        data["encoder.layers.0.ff1.weight"], np.inf
    )
    np.savez(ckpt, **data)
    monkeypatch.setattr("sys.stdin", io.StringIO("你好2021\n"))
    code = main(["normalize", "--checkpoint", str(ckpt)])
    assert code == 3
    assert "non-finite" in capsys.readouterr().err


def test_cli_eval_label_mismatch_is_explicit(tmp_path, capsys):
    ckpt = tmp_path / "m.npz"
    assert main(
        ["train", "--synthetic", "30", "--epochs", "0", "--checkpoint", str(ckpt)]
    ) == 0
    corpus = tmp_path / "c.tsv"
    corpus.write_text("你\tB-NOPE\n", encoding="utf-8")
    code = main(["eval", "--corpus", str(corpus), "--checkpoint", str(ckpt)])
    assert code == 2
    err = capsys.readouterr().err
    assert "incompatible" in err and "B-NOPE" in err
