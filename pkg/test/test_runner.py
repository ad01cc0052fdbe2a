"""Command-line pipeline testing"""

import json
import os

import numpy as np
import pytest

from main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from pcexplain.explain import load_heatmap_csv
from pcexplain.networks import load_model
from pcexplain.pointcloud import load_dataset


def _read(path):
    with open(path, "rb") as file:
        return file.read()


async def generate(out_dir, *extra):
    """Small two-class dataset: 5 clouds of 32 points per class."""
    return await main(
        ["generate", "--out", str(out_dir), "--per-class", "5", "--points", "32", *extra]
    )


@pytest.fixture
def pipeline(tmp_path):
    """Paths used by a generate → train → explain → evaluate run."""
    return {
        "data": tmp_path / "data",
        "model": tmp_path / "model",
        "heatmaps": tmp_path / "heatmaps",
        "report": tmp_path / "report",
    }


async def train(pipeline, *extra):
    """Two-epoch training on the generated manifest."""
    return await main(
        [
            "train",
            "--manifest",
            str(pipeline["data"] / "manifest.json"),
            "--out",
            str(pipeline["model"]),
            "--epochs",
            "2",
            "--feature-dim",
            "16",
            *extra,
        ]
    )


class TestGenerate:
    """generate"""

    @pytest.mark.asyncio
    async def test_writes_manifest(self, tmp_path):
        """clouds, manifest and run settings"""
        assert await generate(tmp_path / "data") == EXIT_OK

        dataset = load_dataset(str(tmp_path / "data" / "manifest.json"))
        assert len(dataset.clouds) == 10
        assert dataset.class_names == ["sphere", "box"]
        assert os.path.isfile(tmp_path / "data" / "run_config.json")

    @pytest.mark.asyncio
    async def test_deterministic(self, tmp_path):
        """same seed, byte-identical clouds"""
        await generate(tmp_path / "a", "--seed", "3")
        await generate(tmp_path / "b", "--seed", "3")

        manifest = json.loads(_read(tmp_path / "a" / "manifest.json"))
        assert _read(tmp_path / "a" / "manifest.json") == _read(tmp_path / "b" / "manifest.json")
        for entry in manifest["clouds"]:
            assert _read(tmp_path / "a" / entry["path"]) == _read(tmp_path / "b" / entry["path"])

    @pytest.mark.asyncio
    async def test_per_class_zero(self, tmp_path, capsys):
        """invalid count is a usage error"""
        assert await generate(tmp_path / "data", "--per-class", "0") == EXIT_USAGE
        assert "'per_class'" in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_unknown_class(self, tmp_path, capsys):
        """unknown shape class is a usage error"""
        assert await generate(tmp_path / "data", "--classes", "sphere,torus") == EXIT_USAGE
        assert "torus" in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_config_file(self, tmp_path):
        """settings from a YAML section"""
        config = tmp_path / "run.yml"
        config.write_text("seed: 2\ngenerate:\n  classes: [cylinder, flange4]\n  per_class: 2\n")

        code = await main(
            ["generate", "-c", str(config), "--out", str(tmp_path / "data"), "--points", "32"]
        )

        assert code == EXIT_OK
        dataset = load_dataset(str(tmp_path / "data" / "manifest.json"))
        assert dataset.class_names == ["cylinder", "flange4"]
        assert dataset.seed == 2


class TestArguments:
    """argparse surface"""

    @pytest.mark.asyncio
    async def test_unknown_command(self):
        """argparse error maps to usage"""
        assert await main(["serve"]) == EXIT_USAGE

    @pytest.mark.asyncio
    async def test_help(self, capsys):
        """help exits cleanly"""
        assert await main(["--help"]) == EXIT_OK
        assert "generate" in capsys.readouterr().out

    @pytest.mark.asyncio
    async def test_missing_manifest(self, tmp_path, capsys):
        """missing input file names the path"""
        missing = str(tmp_path / "nowhere" / "manifest.json")

        assert await main(["train", "--manifest", missing, "--out", str(tmp_path)]) == EXIT_USAGE
        assert missing in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_broken_checkpoint(self, tmp_path, pipeline):
        """unreadable checkpoint is a runtime failure"""
        await generate(pipeline["data"])
        checkpoint = tmp_path / "model.ckpt"
        checkpoint.write_bytes(b"not a model")

        code = await main(
            [
                "explain",
                "--checkpoint",
                str(checkpoint),
                "--manifest",
                str(pipeline["data"] / "manifest.json"),
                "--out",
                str(pipeline["heatmaps"]),
            ]
        )

        assert code == EXIT_FAILURE


class TestPipeline:
    """train, explain and evaluate on a generated dataset"""

    @pytest.mark.asyncio
    async def test_train_outputs(self, pipeline):
        """checkpoint and metrics"""
        await generate(pipeline["data"])

        assert await train(pipeline) == EXIT_OK

        net = load_model(str(pipeline["model"] / "model.ckpt"))
        assert net.kind == "fixed"
        assert net.config.feature_dim == 16
        metrics = json.loads(_read(pipeline["model"] / "metrics.json"))
        assert len(metrics["epochs"]) == 2
        assert metrics["majority_prior"] == 0.5
        assert metrics["final"]["epoch"] == 2

    @pytest.mark.asyncio
    async def test_explain_manifest(self, pipeline):
        """one heatmap per test cloud with inner iteration count 1"""
        await generate(pipeline["data"])
        await train(pipeline)

        code = await main(
            [
                "explain",
                "--checkpoint",
                str(pipeline["model"] / "model.ckpt"),
                "--manifest",
                str(pipeline["data"] / "manifest.json"),
                "--out",
                str(pipeline["heatmaps"]),
                "--export-ply",
            ]
        )

        assert code == EXIT_OK
        stems = sorted(
            name[: -len(".heatmap.csv")]
            for name in os.listdir(pipeline["heatmaps"])
            if name.endswith(".heatmap.csv")
        )
        assert stems == ["test_0000_sphere", "test_0001_box"]
        for stem in stems:
            metadata = json.loads(_read(pipeline["heatmaps"] / f"{stem}.json"))
            assert metadata["diagnostics"]["m"] == 1
            assert os.path.isfile(pipeline["heatmaps"] / f"{stem}.ply")
            cloud, heatmap = load_heatmap_csv(str(pipeline["heatmaps"] / f"{stem}.heatmap.csv"))
            assert cloud.n == heatmap.n == 32

    @pytest.mark.asyncio
    async def test_explain_single_cloud(self, tmp_path, pipeline):
        """a cloud file, a baseline method and a fixed target"""
        await generate(pipeline["data"])
        await train(pipeline)
        cloud_path = pipeline["data"] / "clouds" / "00000_sphere.xyz"

        code = await main(
            [
                "explain",
                "--checkpoint",
                str(pipeline["model"] / "model.ckpt"),
                "--cloud",
                str(cloud_path),
                "--out",
                str(pipeline["heatmaps"]),
                "--method",
                "pcsn",
                "--target",
                "1",
            ]
        )

        assert code == EXIT_OK
        metadata = json.loads(_read(pipeline["heatmaps"] / "00000_sphere.json"))
        assert metadata["method"] == "pcsn"
        assert metadata["target_class"] == 1
        assert metadata["source"] == str(cloud_path)

    @pytest.mark.asyncio
    @pytest.mark.parametrize(
        "extra,fragment",
        [(["--method", "lime"], "unknown method"), (["--target", "7"], "target class 7")],
    )
    async def test_explain_usage_errors(self, pipeline, capsys, extra, fragment):
        """bad method or target"""
        await generate(pipeline["data"])
        await train(pipeline)
        capsys.readouterr()

        code = await main(
            [
                "explain",
                "--checkpoint",
                str(pipeline["model"] / "model.ckpt"),
                "--manifest",
                str(pipeline["data"] / "manifest.json"),
                "--out",
                str(pipeline["heatmaps"]),
                *extra,
            ]
        )

        assert code == EXIT_USAGE
        assert fragment in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_evaluate_report(self, pipeline):
        """AUC table for two methods and a rerun with identical bytes"""
        await generate(pipeline["data"])
        await train(pipeline)
        arguments = [
            "evaluate",
            "--checkpoint",
            str(pipeline["model"] / "model.ckpt"),
            "--manifest",
            str(pipeline["data"] / "manifest.json"),
            "--methods",
            "ape,gradients",
            "--steps",
            "3",
        ]

        assert await main([*arguments, "--out", str(pipeline["report"])]) == EXIT_OK
        assert await main([*arguments, "--out", str(pipeline["report"]) + "2"]) == EXIT_OK

        report = json.loads(_read(pipeline["report"] / "report.json"))
        methods = report["networks"]["fixed"]["methods"]
        assert set(methods) == {"ape", "gradients"}
        assert methods["ape"]["high_drop"]["fractions"] == [0.0, 0.5, 1.0]
        assert report["num_clouds"] == 2
        assert report["steps"] == 3
        for name in ("report.json", "report.md"):
            assert _read(pipeline["report"] / name) == _read(str(pipeline["report"]) + "2/" + name)

    @pytest.mark.asyncio
    async def test_repeated_pipeline_is_byte_identical(self, tmp_path):
        """same seed twice: identical checkpoints, heatmap CSVs and reports"""
        runs = []
        for name in ("first", "second"):
            paths = {key: tmp_path / name / key for key in ("data", "model", "heatmaps", "report")}
            checkpoint = str(paths["model"] / "model.ckpt")
            manifest = str(paths["data"] / "manifest.json")
            assert await generate(paths["data"]) == EXIT_OK
            assert await train(paths) == EXIT_OK
            explain = ["explain", "--checkpoint", checkpoint, "--manifest", manifest]
            assert await main([*explain, "--out", str(paths["heatmaps"])]) == EXIT_OK
            evaluate = ["evaluate", "--checkpoint", checkpoint, "--manifest", manifest]
            assert (
                await main([*evaluate, "--steps", "3", "--out", str(paths["report"])]) == EXIT_OK
            )
            runs.append(paths)

        first, second = runs
        csvs = sorted(n for n in os.listdir(first["heatmaps"]) if n.endswith(".heatmap.csv"))
        assert csvs
        assert csvs == sorted(
            n for n in os.listdir(second["heatmaps"]) if n.endswith(".heatmap.csv")
        )
        for name in csvs:
            assert _read(first["heatmaps"] / name) == _read(second["heatmaps"] / name)
        assert _read(first["model"] / "model.ckpt") == _read(second["model"] / "model.ckpt")
        for name in ("report.json", "report.md"):
            assert _read(first["report"] / name) == _read(second["report"] / name)

    @pytest.mark.asyncio
    async def test_evaluate_steps(self, pipeline, capsys):
        """steps below 2"""
        await generate(pipeline["data"])
        await train(pipeline)
        capsys.readouterr()

        code = await main(
            [
                "evaluate",
                "--checkpoint",
                str(pipeline["model"] / "model.ckpt"),
                "--manifest",
                str(pipeline["data"] / "manifest.json"),
                "--steps",
                "1",
                "--out",
                str(pipeline["report"]),
            ]
        )

        assert code == EXIT_USAGE
        assert "'steps'" in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_variable_network(self, pipeline):
        """train and evaluate the sampling network"""
        await generate(pipeline["data"])
        assert await train(pipeline, "--net", "variable", "--neighbors", "4") == EXIT_OK

        code = await main(
            [
                "evaluate",
                "--checkpoint",
                str(pipeline["model"] / "model.ckpt"),
                "--manifest",
                str(pipeline["data"] / "manifest.json"),
                "--methods",
                "ape",
                "--steps",
                "3",
                "--out",
                str(pipeline["report"]),
            ]
        )

        assert code == EXIT_OK
        report = json.loads(_read(pipeline["report"] / "report.json"))
        accuracies = report["networks"]["variable"]["methods"]["ape"]["low_drop"]["accuracies"]
        assert all(0.0 <= value <= 1.0 for value in accuracies)
        assert np.isfinite(report["majority_prior"])
