import os

import numpy as np
import pandas as pd
import pytest

from skylink.errors import ConfigParseError, OutputError
from skylink.experiment.drop import run_drop
from skylink.io.manifest import MANIFEST_NAME, RunManifest, load_manifest, write_manifest
from skylink.io.outputs import (LINK_COLUMNS, UE_COLUMNS, append_csv, emit_outputs, layout_frames, links_frame,
                                ue_results_frame, write_csv)
from skylink.scenario import ScenarioConfig, validate_config


@pytest.fixture(scope="module")
def drop():
    return run_drop(validate_config(ScenarioConfig(n_ue=57, n_drops=1, rng_seed=4)), 0)


def test_refuses_to_overwrite(tmp_path):
    path = str(tmp_path / "table.csv")
    frame = pd.DataFrame({"a": [1.0, 2.0]})
    write_csv(frame, path)
    with pytest.raises(OutputError):
        write_csv(frame, path)
    write_csv(pd.DataFrame({"a": [3.0]}), path, force=True)
    assert pd.read_csv(path)["a"].tolist() == [3.0]


def test_emit_checks_every_target_first(tmp_path):
    (tmp_path / "second.csv").write_text("x\n1\n")
    tables = {"first.csv": pd.DataFrame({"x": [1]}), "second.csv": pd.DataFrame({"x": [2]})}
    with pytest.raises(OutputError):
        emit_outputs(tables, str(tmp_path))
    assert not (tmp_path / "first.csv").exists()
    assert emit_outputs(tables, str(tmp_path), force=True) == ["first.csv", "second.csv"]


def test_append_writes_header_once(tmp_path):
    path = str(tmp_path / "rows.csv")
    append_csv(pd.DataFrame({"a": [1], "b": [2]}), path)
    append_csv(pd.DataFrame({"a": [3], "b": [4]}), path)
    with open(path) as fh:
        assert fh.read() == "a,b\n1,2\n3,4\n"


def test_float_format(tmp_path):
    path = str(tmp_path / "f.csv")
    write_csv(pd.DataFrame({"v": [1.0 / 3.0]}), path)
    with open(path) as fh:
        assert fh.read().splitlines()[1] == "0.333333"


def test_empty_ue_results_has_header(tmp_path):
    path = str(tmp_path / "ue_results.csv")
    write_csv(ue_results_frame([]), path)
    with open(path) as fh:
        assert fh.read() == ",".join(UE_COLUMNS) + "\n"


def test_ue_results_frame(drop):
    frame = ue_results_frame([drop, drop])
    assert list(frame.columns) == UE_COLUMNS
    assert len(frame) == 2 * 57
    assert frame["ue"].max() == 56
    assert np.all(frame["rate_mbps"] >= 0)


def test_layout_and_links_frames(drop):
    sites, ues = layout_frames(drop.deployment)
    assert len(sites) == 19
    assert len(ues) == 57
    links = links_frame(drop.links)
    assert list(links.columns) == LINK_COLUMNS
    assert len(links) == 57 * 57
    assert set(links["los"].unique()) <= {0, 1}


def test_manifest_round_trip(tmp_path):
    manifest = RunManifest(command="run", arguments={"interference": True}, config={"n_ue": 57}, seed=4,
                           outputs=["ue_results.csv"], summary={"n_samples": 57})
    path = write_manifest(manifest, str(tmp_path))
    assert os.path.basename(path) == MANIFEST_NAME
    assert os.listdir(tmp_path) == [MANIFEST_NAME]
    assert load_manifest(str(tmp_path)) == manifest
    assert load_manifest(path) == manifest


def test_manifest_with_unexpected_fields(tmp_path):
    (tmp_path / MANIFEST_NAME).write_text('{"command": "run", "bogus": 1}')
    with pytest.raises(ConfigParseError):
        load_manifest(str(tmp_path))
