"""
Data management module for the newton-osc toolkit
Handles the JSON term format for phases and weights, JSON reports and CSV plot data
"""
import csv
import json
import logging
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import config
from errors import InputFormatError
from power_data import FlatMarker, PowerData
from utils import to_rat, utc_timestamp

logger = logging.getLogger('newton_osc.data')


class DataManager:
    """Class to handle all data loading and saving operations"""

    @staticmethod
    def load_data(filename: str) -> Dict:
        """Load data from a JSON file"""
        try:
            with open(filename, "r") as f:
                return json.load(f)
        except FileNotFoundError as e:
            raise InputFormatError(f"Input file {filename} not found") from e
        except json.JSONDecodeError as e:
            raise InputFormatError(f"Input file {filename} is not valid JSON: {e}") from e

    @staticmethod
    def save_data(filename: str, data: Dict) -> None:
        """Save data to a JSON file"""
        with open(filename, "w") as f:
            json.dump(data, f, indent=2)
        logger.debug(f"Data saved to {filename}")

    @staticmethod
    def parse_power_data(obj: Any) -> PowerData:
        """
        Parse one function in the JSON term format.

        Args:
            obj: {n, denomVector?, terms: [{exp, coeff}], flatMarkers?: [{exp, axis, scale?}]}
                 with coefficients as "p/q" strings or numbers and 1-based marker axes

        Returns:
            PowerData
        """
        if not isinstance(obj, dict):
            raise InputFormatError(f"Expected an object with n and terms, got {type(obj).__name__}")
        try:
            n = int(obj["n"])
            terms = {}
            for term in obj.get("terms", []):
                exp = tuple(int(e) for e in term["exp"])
                terms[exp] = terms.get(exp, 0) + to_rat(term["coeff"])
            markers = [FlatMarker(tuple(int(e) for e in m["exp"]), int(m["axis"]) - 1, to_rat(m.get("scale", "1")))
                       for m in obj.get("flatMarkers", [])]
        except (KeyError, TypeError, ValueError) as e:
            raise InputFormatError(f"Malformed term data: {e}") from e
        return PowerData.from_terms(n, terms, obj.get("denomVector"), markers)

    @classmethod
    def load_pair(cls, filename: str) -> Tuple[PowerData, Optional[PowerData]]:
        """Phase f and optional weight g from one JSON file"""
        data = cls.load_data(filename)
        if "f" not in data:
            raise InputFormatError(f"{filename} has no phase 'f'")
        f = cls.parse_power_data(data["f"])
        g = cls.parse_power_data(data["g"]) if data.get("g") is not None else None
        if g is not None and g.n != f.n:
            raise InputFormatError(f"Phase has n = {f.n} but weight has n = {g.n}")
        logger.info(f"📥 Loaded f = {f}" + (f", g = {g}" if g is not None else ", unit weight"))
        return f, g

    @staticmethod
    def parse_permutation(text: Optional[str], n: int) -> Optional[Tuple[int, ...]]:
        """'2,1,3' -> (1, 0, 2)"""
        if not text:
            return None
        try:
            perm = tuple(int(part) - 1 for part in text.split(","))
        except ValueError as e:
            raise InputFormatError(f"Bad permutation {text!r}") from e
        if sorted(perm) != list(range(n)):
            raise InputFormatError(f"{text!r} is not a permutation of 1..{n}")
        return perm

    @staticmethod
    def report(kind: str, body: Dict) -> Dict:
        """Wrap a report body with the toolkit header"""
        return {"tool": config.NAME, "version": config.VERSION, "kind": kind,
                "generatedAt": utc_timestamp(), **body}

    @staticmethod
    def write_csv(filename: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
        with open(filename, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)
        logger.info(f"💾 Plot data written to {filename}")
