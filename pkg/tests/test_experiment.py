import numpy as np
import pytest

import refocus as r
from refocus.cli import main
from refocus.operators import BoundaryCondition as BC


def test_scene_values_and_shape():
    scene = r.low_frequency_scene((20, 30))
    assert scene.shape == (20, 30)
    assert scene.min() > 0.0 and scene.max() < 1.0
    color = r.low_frequency_scene_color((10, 12))
    assert color.shape == (3, 10, 12)
    assert color.min() > 0.0 and color.max() < 1.0
    # channels differ but share the slow structure
    assert not np.array_equal(color[0], color[1])


def test_parse_psf_spec_variants(tmp_path):
    assert r.parse_psf_spec("identity").weights.shape == (1, 1)
    g = r.parse_psf_spec("gaussian:1,2:0.8,1.7")
    assert g.half_support == (1, 2)
    d = r.parse_psf_spec("disk:2:1.5")
    assert d.half_support == (2, 2)
    path = tmp_path / "m.txt"
    r.save_mask(r.gaussian_mask((1, 1), 1.0), path)
    loaded = r.parse_psf_spec(f"file:{path}")
    assert loaded.half_support == (1, 1)


def test_parse_psf_spec_errors():
    for bad in ("identity:3", "gaussian:2", "disk:1", "blob:1:2", "file:",
                "gaussian:a:1", "gaussian:1:0"):
        with pytest.raises(r.ConfigError):
            r.parse_psf_spec(bad)


def test_config_parsing_defaults_and_overrides(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "# demo config\n"
        "scene = sinusoids:16x14\n"
        "psf = gaussian:1:0.8  # small blur\n"
        "rho = 0,0.01\n"
        "seed = 7\n"
    )
    config = r.load_config(cfg)
    assert config.bcs == (BC.REFLECTIVE, BC.ANTIREFLECTIVE)
    assert config.methods == ("tsd",)
    assert config.rhos == (0.0, 0.01)
    assert config.seed == 7
    config = r.load_config(cfg, overrides=["seed=9", "method=tsd,tikhonov"])
    assert config.seed == 9
    assert config.methods == ("tsd", "tikhonov")


def test_config_errors(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("scene = sinusoids:8x8\npsf = identity\nscene = x\n")
    with pytest.raises(r.ConfigError):
        r.load_config(cfg)
    cfg.write_text("scene = sinusoids:8x8\npsf = identity\ntypo = 1\n")
    with pytest.raises(r.ConfigError):
        r.load_config(cfg)
    cfg.write_text("psf = identity\n")
    with pytest.raises(r.ConfigError):
        r.load_config(cfg)
    cfg.write_text("scene = sinusoids:8x8\npsf = identity\nbc = periodic\n")
    with pytest.raises(r.ConfigError):
        r.load_config(cfg)
    cfg.write_text("scene = sinusoids:8x8\npsf = identity\nmethod = magic\n")
    with pytest.raises(r.ConfigError):
        r.load_config(cfg)
    cfg.write_text("scene = sinusoids:8x8\npsf = identity\nrho = -1\n")
    with pytest.raises(r.ConfigError):
        r.load_config(cfg)
    cfg.write_text("scene = sinusoids:8x8\npsf = identity\nnot a pair\n")
    with pytest.raises(r.ConfigError):
        r.load_config(cfg)


def test_scene_too_small_rejected(tmp_path):
    config = r.load_config(
        None,
        overrides=[
            "scene=sinusoids:4x4",
            "psf=gaussian:2:1.5",
            f"out={tmp_path / 'x'}",
        ],
    )
    with pytest.raises(r.ConfigError):
        r.run_experiment(config)


def test_gray_scene_with_mix_rejected(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "scene = scene.pgm\npsf = identity\n"
        "mix = 1,0,0,0,1,0,0,0,1\n"
    )
    r.write_image(tmp_path / "scene.pgm", r.low_frequency_scene((6, 6)))
    config = r.load_config(cfg, overrides=[f"scene={tmp_path / 'scene.pgm'}",
                                           f"out={tmp_path / 'x'}"])
    with pytest.raises(r.ConfigError):
        r.run_experiment(config)


def test_run_experiment_gray(tmp_path):
    out = tmp_path / "results"
    config = r.load_config(
        None,
        overrides=[
            "scene=sinusoids:16x14",
            "psf=gaussian:1:0.8",
            "method=tsd,tikhonov",
            "rho=0,0.01",
            "seed=1",
            "max_terms=100",
            f"out={out}",
        ],
    )
    result = r.run_experiment(config)
    assert result == out
    summary = (out / "summary.csv").read_text().strip().splitlines()
    assert summary[0] == "bc,method,rho,optimum_param,rre"
    assert len(summary) == 1 + 2 * 2 * 2
    for sub in ("reflective_tsd_rho0", "antireflective_tikhonov_rho0.01"):
        assert (out / sub / "curve.csv").is_file()
        assert (out / sub / "picard.csv").is_file()
        assert (out / sub / "restored.pgm").is_file()
    # tikhonov rows carry float parameters, truncation rows integers
    for line in summary[1:]:
        bc, method, rho, param, err = line.split(",")
        assert bc in ("reflective", "antireflective")
        float(rho), float(err)
        if method == "tikhonov":
            assert "e" in param
        else:
            int(param)


def test_run_experiment_rerun_is_byte_identical(tmp_path):
    base = [
        "scene=sinusoids:14x14",
        "psf=gaussian:1:0.7",
        "method=tsd",
        "rho=0.01",
        "seed=3",
        "max_terms=60",
    ]
    out1 = tmp_path / "one"
    out2 = tmp_path / "two"
    r.run_experiment(r.load_config(None, base + [f"out={out1}"]))
    r.run_experiment(r.load_config(None, base + [f"out={out2}"]))
    files1 = sorted(p.relative_to(out1) for p in out1.rglob("*") if p.is_file())
    files2 = sorted(p.relative_to(out2) for p in out2.rglob("*") if p.is_file())
    assert files1 == files2 and files1
    for rel in files1:
        assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes()


def test_run_experiment_color(tmp_path):
    out = tmp_path / "color"
    config = r.load_config(
        None,
        overrides=[
            "scene=sinusoids:12x12",
            "psf=gaussian:1:0.7",
            "method=tsd,tsvd,tikhonov",
            "rho=0.01",
            "seed=2",
            "mix=0.8,0.1,0.1,0.1,0.8,0.1,0.1,0.1,0.8",
            "max_terms=50",
            f"out={out}",
        ],
    )
    r.run_experiment(config)
    assert (out / "reflective_tsvd_rho0.01" / "restored.ppm").is_file()
    summary = (out / "summary.csv").read_text().strip().splitlines()
    assert len(summary) == 1 + 2 * 3


def test_cli_blur_restore_sweep(tmp_path):
    truth = tmp_path / "truth.txt"
    blurred = tmp_path / "blurred.txt"
    restored = tmp_path / "restored.txt"
    curve = tmp_path / "curve.csv"
    r.write_matrix(truth, r.low_frequency_scene((16, 15)))
    assert main([
        "blur", "--image", str(truth), "--psf", "gaussian:1:0.9",
        "--bc", "antireflective", "--out", str(blurred),
    ]) == 0
    assert main([
        "restore", "--image", str(blurred), "--psf", "gaussian:1:0.9",
        "--bc", "antireflective", "--method", "tikhonov",
        "--mu", "1e-6", "--out", str(restored),
    ]) == 0
    est = r.read_matrix(restored)
    assert r.rre(est, r.read_matrix(truth)) <= 1e-3
    assert main([
        "sweep", "--image", str(blurred), "--reference", str(truth),
        "--psf", "gaussian:1:0.9", "--bc", "antireflective",
        "--method", "tsd", "--out", str(curve), "--max-terms", "50",
    ]) == 0
    assert curve.read_text().startswith("param,rre\n")


def test_cli_blur_matches_api(tmp_path):
    truth = tmp_path / "truth.txt"
    blurred = tmp_path / "blurred.txt"
    f = r.low_frequency_scene((10, 9))
    r.write_matrix(truth, f)
    main([
        "blur", "--image", str(truth), "--psf", "disk:1:1.0",
        "--bc", "reflective", "--out", str(blurred),
    ])
    op = r.BlurOperator(r.out_of_focus_mask((1, 1), 1.0), BC.REFLECTIVE, (10, 9))
    assert np.array_equal(r.read_matrix(blurred), r.apply_blur(op, f))


def test_cli_exit_codes(tmp_path, capsys):
    truth = tmp_path / "truth.txt"
    r.write_matrix(truth, r.low_frequency_scene((8, 8)))
    # conflicting filter parameters
    code = main([
        "restore", "--image", str(truth), "--psf", "identity",
        "--bc", "reflective", "--method", "tsd",
        "--count", "3", "--mu", "0.1", "--out", str(tmp_path / "o.txt"),
    ])
    assert code == 2
    # missing input file
    code = main([
        "blur", "--image", str(tmp_path / "nope.pgm"), "--psf", "identity",
        "--bc", "zero", "--out", str(tmp_path / "o.pgm"),
    ])
    assert code == 2
    # bad psf spec
    code = main([
        "blur", "--image", str(truth), "--psf", "wobble:3",
        "--bc", "zero", "--out", str(tmp_path / "o.txt"),
    ])
    assert code == 2
    capsys.readouterr()


def test_cli_experiment(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "scene = sinusoids:12x12\npsf = gaussian:1:0.7\n"
        "method = tsd\nrho = 0.01\nseed = 4\nmax_terms = 40\n"
    )
    out = tmp_path / "res"
    code = main([
        "experiment", "--config", str(cfg), "--out", str(out),
        "--set", "rho=0.02",
    ])
    assert code == 0
    summary = (out / "summary.csv").read_text()
    assert "2.000000e-02" in summary
