# tests/test_utils.py
import json
import logging
import math
import numpy as np
import pytest
from utils.config import Config
from utils.errors import (GromovError, InputError, NumericalError, ParseError, SchemaError, NotCoprime,
                          QuadratureBudgetExceeded, NoConvergence, ConservationError)
from utils.logging_utils import setup_logger
from utils.serialization import (encode_complex, decode_complex, encode_float, to_jsonable, dumps, loads,
                                 check_schema_version)


class TestSerialization:
    def test_complex_pairs(self):
        assert encode_complex(1 - 2j) == [1.0, -2.0]
        assert decode_complex([1, -2]) == 1 - 2j
        assert decode_complex(3) == 3 + 0j

    def test_infinity(self):
        assert encode_complex(complex(math.inf, 0)) == "inf"
        assert math.isinf(decode_complex("inf").real)

    def test_bad_complex(self):
        for value in ([1, 2, 3], True, "x", [1, "a"]):
            with pytest.raises(SchemaError):
                decode_complex(value)

    def test_non_finite_floats(self):
        assert encode_float(math.inf) == "inf"
        assert encode_float(-math.inf) == "-inf"
        assert encode_float(math.nan) == "nan"

    def test_numpy_values(self):
        doc = to_jsonable({1: np.float64(0.5), "a": np.arange(3), "b": np.bool_(True), "z": np.complex128(1j)})
        assert doc == {"1": 0.5, "a": [0, 1, 2], "b": True, "z": [0.0, 1.0]}

    def test_dumps_is_strict_json(self):
        text = dumps({"x": math.inf, "y": [1 + 1j]})
        assert json.loads(text) == {"x": "inf", "y": [[1.0, 1.0]]}

    def test_parse_error_position(self):
        with pytest.raises(ParseError) as info:
            loads('{\n  "schema": 1,\n  "tuple": ]\n}')
        assert info.value.line == 3

    def test_schema_version(self):
        assert check_schema_version({"schema": 1}) == {"schema": 1}
        with pytest.raises(SchemaError):
            check_schema_version({"schema": 2})
        with pytest.raises(SchemaError):
            check_schema_version([1])


class TestErrors:
    def test_exit_codes(self):
        assert GromovError.exit_code == 1
        assert InputError.exit_code == 2
        assert NumericalError.exit_code == 3
        assert NotCoprime.exit_code == 2
        for cls in (QuadratureBudgetExceeded, NoConvergence, ConservationError):
            assert cls.exit_code == 3

    def test_schema_error_fields(self):
        e = SchemaError("common degree", "tuple")
        assert e.field == "tuple" and e.constraint == "common degree"
        assert "[tuple]" in str(e)


class TestLogging:
    def test_no_duplicate_handlers(self):
        first = setup_logger("tests.logger")
        second = setup_logger("tests.logger")
        assert first is second
        assert len(second.handlers) == 1

    def test_level_from_config(self, monkeypatch):
        monkeypatch.setattr(Config, "LOG_LEVEL", "DEBUG")
        assert setup_logger("tests.debug_logger").level == logging.DEBUG

    def test_file_handler(self, monkeypatch, tmp_path):
        monkeypatch.setattr(Config, "LOG_DIR", str(tmp_path / "logs"))
        logger = setup_logger("tests.file_logger")
        assert any(isinstance(h, logging.FileHandler) for h in logger.handlers)
        assert (tmp_path / "logs").is_dir()
        for handler in logger.handlers:
            handler.close()
