"""
矩阵文件格式、本地存储和运行目录
"""
import os

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from altmin.config import AltMinConfig
from altmin.trace import TRACE_COLUMNS
from core.errors import MatrixFormatError
from deepfact.forward import forward_factorize
from deepfact.ledger import sparsity_levels
from genmodel.synthesis import synthesize
from storage.local_storage import MATRIX_SUFFIX, TEMP_SUFFIX, LocalStorage
from storage.matrix_codec import HEADER_SIZE, MAGIC, decode_matrix, encode_matrix
from storage.run_store import (load_instance, save_factorization, save_instance,
                               stage_file_name)


def test_matrix_layout():
    M = np.array([[1.0, -2.0, 0.5], [0.0, 3.25, -1e-300]])
    data = encode_matrix(M)
    assert data[:8] == MAGIC
    assert len(data) == HEADER_SIZE + 6 * 8
    assert int.from_bytes(data[8:16], "little") == 2
    assert int.from_bytes(data[16:24], "little") == 3
    # 行主序
    assert np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE)[3] == 0.0
    assert_array_equal(decode_matrix(data), M)


@pytest.mark.parametrize("data", [
    b"DS2P",
    b"NOTAMAT1" + bytes(16),
    MAGIC + np.array([2, 2], dtype="<u8").tobytes() + bytes(8 * 3),
    MAGIC + np.array([1, 1], dtype="<u8").tobytes() + bytes(8 * 2),
])
def test_malformed_matrix_files(data):
    with pytest.raises(MatrixFormatError):
        decode_matrix(data)


def test_local_storage_round_trip(tmp_path):
    storage = LocalStorage(str(tmp_path / "run"))
    storage.save("a/b.txt", b"hello")
    assert storage.get("a/b.txt") == b"hello"
    assert storage.get("missing") is None
    assert storage.exists("a/b.txt")

    storage.save_matrix("M", np.eye(3))
    assert_array_equal(storage.load_matrix("M"), np.eye(3))
    assert os.path.isfile(tmp_path / "run" / ("M" + MATRIX_SUFFIX))
    with pytest.raises(FileNotFoundError):
        storage.load_matrix("N")

    storage.save_json("doc.json", {"b": 1, "a": [1, 2]})
    assert storage.load_json("doc.json") == {"a": [1, 2], "b": 1}
    text = (tmp_path / "run" / "doc.json").read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"')

    storage.save_csv("t.csv", ["x", "y"], [{"x": 1, "y": 2.5}])
    assert (tmp_path / "run" / "t.csv").read_text() == "x,y\n1,2.5\n"

    assert storage.get_all_names() == sorted(["a/b.txt", "M" + MATRIX_SUFFIX, "doc.json", "t.csv"])
    assert storage.delete("t.csv")
    assert not storage.delete("t.csv")


def test_stale_temp_files_are_removed(tmp_path):
    storage = LocalStorage(str(tmp_path))
    storage.save("keep.bin", b"1")
    (tmp_path / (".x" + TEMP_SUFFIX)).write_bytes(b"half")
    os.makedirs(tmp_path / "sub")
    (tmp_path / "sub" / (".y" + TEMP_SUFFIX)).write_bytes(b"half")
    assert storage.get_all_names() == ["keep.bin"]
    assert storage.cleanup_stale() == 2
    assert storage.cleanup_stale() == 0


def test_missing_directory_is_not_created(tmp_path):
    with pytest.raises(FileNotFoundError):
        LocalStorage(str(tmp_path / "nope"), create=False)
    assert not (tmp_path / "nope").exists()


def test_stage_file_names():
    assert stage_file_name("A(1->2)") == "A_1-2"
    assert stage_file_name("A(2)") == "A_2"


def test_instance_round_trip(tmp_path, gentle_instance):
    storage = LocalStorage(str(tmp_path / "inst"))
    manifest = save_instance(storage, gentle_instance)
    assert sorted(manifest["matrices"]) == ["A1", "A2", "X", "Y", "Y1"]
    assert manifest["matrices"]["Y"] == [18, 600]

    loaded = load_instance(str(tmp_path / "inst"))
    assert loaded.seed == gentle_instance.seed
    assert loaded.spec.dims == gentle_instance.spec.dims
    for name, M in gentle_instance.named_matrices().items():
        assert_array_equal(loaded.named_matrices()[name], M)

    with pytest.raises(FileNotFoundError):
        load_instance(str(tmp_path / "absent"))


def test_instance_shape_mismatch(tmp_path, gentle_instance):
    storage = LocalStorage(str(tmp_path))
    save_instance(storage, gentle_instance)
    storage.save_matrix("X", np.zeros((3, 3)))
    with pytest.raises(MatrixFormatError):
        load_instance(str(tmp_path))


def test_matrix_files_are_byte_identical_across_reruns(tmp_path, gentle_spec):
    first = LocalStorage(str(tmp_path / "a"))
    second = LocalStorage(str(tmp_path / "b"))
    save_instance(first, synthesize(gentle_spec, 100, seed=11))
    save_instance(second, synthesize(gentle_spec, 100, seed=11))
    assert first.get_all_names() == second.get_all_names()
    for name in first.get_all_names():
        assert first.get(name) == second.get(name), name


def test_save_factorization_writes_every_stage(tmp_path, gentle_instance):
    inits = [gentle_instance.product(1), gentle_instance.product(2)]
    report = forward_factorize(gentle_instance.observations, inits,
                               sparsity_levels(gentle_instance.spec), AltMinConfig(T=1),
                               instance=gentle_instance)
    storage = LocalStorage(str(tmp_path))
    written = save_factorization(storage, report)
    assert "report.json" in written
    assert "X_hat" in written
    assert "trace_A_1-2.csv" in written and "trace_A_2-2.csv" in written
    for name in report.recovered():
        assert storage.exists(stage_file_name(name) + MATRIX_SUFFIX)
    header = (tmp_path / "trace_A_1-2.csv").read_text().splitlines()[0]
    assert header == ",".join(TRACE_COLUMNS)
    assert storage.load_json("report.json")["mode"] == "forward"
