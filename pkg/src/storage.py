"""
Storage Module
JSON file formats for models and network classes, and the optional
results log of decision runs.
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Union

from .errors import ModelFormatError
from .formula import Group, agent_sort_key
from .models import NeighborhoodModel, build_model
from .networks import (
    BuiltinClass,
    CohesionNetwork,
    FilteredClass,
    NetworkClass,
    NetworkFilter,
    coalition_key,
    make_explicit_class,
    parse_class_spec,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_MODEL_KEYS = {"worlds", "valuation", "E", "A", "designated"}


# Models ---------------------------------------------------------------------

def model_to_dict(model: NeighborhoodModel, designated: Optional[str] = None) -> Dict:
    """
    Convert a model to its JSON-ready form.

    Sets of worlds are listed in the model's world order and families of
    sets are sorted, so equal models always give identical output.
    """
    position = {w: i for i, w in enumerate(model.worlds)}

    def world_list(ws) -> List[str]:
        return sorted(ws, key=lambda w: position.get(w, len(position)))

    def table_to_dict(table) -> Dict:
        return {
            agent: {
                w: sorted((world_list(x) for x in table[agent].get(w, ())),
                          key=lambda xs: (len(xs), [position.get(v, 0) for v in xs]))
                for w in model.worlds
            }
            for agent in sorted(table, key=agent_sort_key)
        }

    data = {
        "worlds": list(model.worlds),
        "valuation": {p: world_list(model.valuation[p]) for p in sorted(model.valuation)},
        "E": table_to_dict(model.e_neighborhoods),
        "A": table_to_dict(model.a_neighborhoods),
    }
    if designated is not None:
        data["designated"] = designated
    return data


def model_from_dict(data: Dict) -> NeighborhoodModel:
    """
    Build a model from its JSON form.

    Missing world entries stand for empty neighborhood sets. Unknown keys
    are rejected; a "designated" key is accepted and ignored here (see
    load_model_with_world).

    Raises:
        ModelFormatError: When the structure does not follow the format
    """
    if not isinstance(data, dict):
        raise ModelFormatError("a model file must contain a JSON object")
    unknown = set(data) - _MODEL_KEYS
    if unknown:
        raise ModelFormatError(f"unknown keys in model file: {', '.join(sorted(unknown))}")
    if "worlds" not in data:
        raise ModelFormatError("model file lacks the 'worlds' list")

    worlds = data["worlds"]
    if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
        raise ModelFormatError("'worlds' must be a list of world ids")

    valuation = data.get("valuation", {})
    if not isinstance(valuation, dict) or not all(isinstance(v, list) for v in valuation.values()):
        raise ModelFormatError("'valuation' must map atom names to lists of worlds")

    tables = {}
    for key in ("E", "A"):
        table = data.get(key, {})
        if not isinstance(table, dict):
            raise ModelFormatError(f"'{key}' must map agents to per-world neighborhoods")
        for agent, per_world in table.items():
            if not isinstance(per_world, dict):
                raise ModelFormatError(f"'{key}' entry for agent {agent} must be an object")
            for w, sets in per_world.items():
                if not isinstance(sets, list) or not all(isinstance(x, list) for x in sets):
                    raise ModelFormatError(
                        f"'{key}' neighborhoods of agent {agent} at {w} must be a list of lists"
                    )
        tables[key] = table

    return build_model(worlds, valuation, tables["E"], tables["A"])


def load_model_with_world(path: PathLike):
    """Read a model file, returning (model, designated world or None)."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from None
    model = model_from_dict(data)
    designated = data.get("designated")
    if designated is not None and not isinstance(designated, str):
        raise ModelFormatError("'designated' must be a world id")
    return model, designated


def load_model(path: PathLike) -> NeighborhoodModel:
    """Read a model file."""
    return load_model_with_world(path)[0]


def save_model(model: NeighborhoodModel, path: PathLike,
               designated: Optional[str] = None) -> Path:
    """
    Write a model file (sorted keys, indent 2, trailing newline).

    Args:
        model: Model to write
        path: Target file
        designated: World the model was produced for (witness/countermodel)

    Returns:
        Path of the written file
    """
    path = Path(path)
    text = json.dumps(model_to_dict(model, designated), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info("model with %d worlds written to %s", len(model.worlds), path)
    return path


# Network classes ------------------------------------------------------------

def _group_key(members) -> str:
    return ",".join(sorted(members, key=agent_sort_key))


def _coalition_list(c) -> List[str]:
    return sorted(c, key=agent_sort_key)


def network_class_to_dict(cls: NetworkClass) -> Dict:
    """Convert a class to the class-file form."""
    filters: List[str] = []
    base = cls
    while isinstance(base, FilteredClass):
        filters = [str(f) for f in base.filters] + filters
        base = base.base

    if isinstance(base, BuiltinClass):
        return {"kind": "builtin", "name": base.name, "filters": filters}

    if filters:
        raise ModelFormatError("filters over an explicit class cannot be written to a class file")
    networks = {}
    for members in sorted(base.networks, key=coalition_key):
        networks[_group_key(members)] = [
            {"edges": [[_coalition_list(a), _coalition_list(b)] for a, b in net.sorted_edges()]}
            for net in base.networks[members]
        ]
    return {"kind": "explicit", "networks": networks}


def _edges_from_json(raw, key: str):
    if not isinstance(raw, list):
        raise ModelFormatError(f"malformed edge list for {key}")
    edges = []
    for edge in raw:
        if not isinstance(edge, list) or len(edge) != 2:
            raise ModelFormatError(f"malformed edge list for {key}")
        for end in edge:
            if not isinstance(end, list) or not all(isinstance(a, str) for a in end):
                raise ModelFormatError(f"edge endpoints for {key} must be lists of agent names")
        edges.append((frozenset(edge[0]), frozenset(edge[1])))
    return edges


def network_class_from_dict(data: Dict, allow_self_edges: bool = False) -> NetworkClass:
    """
    Build a class from the class-file form.

    Raises:
        ModelFormatError: For structural problems in the file
        InvalidNetworkClassError: For networks outside c0 or unknown names
    """
    if not isinstance(data, dict) or "kind" not in data:
        raise ModelFormatError("a class file must be an object with a 'kind' key")

    kind = data["kind"]
    if kind == "builtin":
        unknown = set(data) - {"kind", "name", "filters"}
        if unknown:
            raise ModelFormatError(f"unknown keys in class file: {', '.join(sorted(unknown))}")
        name = data.get("name")
        if not isinstance(name, str):
            raise ModelFormatError("a builtin class needs a 'name'")
        filters = data.get("filters", [])
        if not isinstance(filters, list) or not all(isinstance(f, str) for f in filters):
            raise ModelFormatError("'filters' must be a list of filter names")
        base = BuiltinClass(name)
        if not filters:
            return base
        return FilteredClass(base, tuple(NetworkFilter.parse(f) for f in filters))

    if kind == "explicit":
        unknown = set(data) - {"kind", "networks"}
        if unknown:
            raise ModelFormatError(f"unknown keys in class file: {', '.join(sorted(unknown))}")
        listed = data.get("networks", {})
        if not isinstance(listed, dict):
            raise ModelFormatError("'networks' must map group keys to network lists")
        networks = {}
        for key, nets in listed.items():
            group = Group(a.strip() for a in key.split(","))
            if not isinstance(nets, list):
                raise ModelFormatError(f"networks for {key} must be a list")
            parsed = []
            for entry in nets:
                if not isinstance(entry, dict) or set(entry) != {"edges"}:
                    raise ModelFormatError(f"each network for {key} must be {{\"edges\": [...]}}")
                edges = _edges_from_json(entry["edges"], key)
                parsed.append(CohesionNetwork.from_edges(group, edges))
            networks[group.members] = parsed
        return make_explicit_class(networks, allow_self_edges)

    raise ModelFormatError(f"unknown class kind {kind!r}; expected 'builtin' or 'explicit'")


def load_network_class(path: PathLike, allow_self_edges: bool = False) -> NetworkClass:
    """Read a class file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from None
    return network_class_from_dict(data, allow_self_edges)


def resolve_class(spec: str, allow_self_edges: bool = False) -> NetworkClass:
    """A class from a spec string ("c0+max-edges:2") or a path to a class file."""
    if spec.endswith(".json"):
        return load_network_class(spec, allow_self_edges)
    return parse_class_spec(spec)


# Results log ----------------------------------------------------------------

class ResultStorage:
    """Append-only log of decision results in a local JSON file."""

    def __init__(self, storage_dir: PathLike = "data"):
        """
        Initialize the storage handler.

        Args:
            storage_dir: Directory to store results (default: "data")
        """
        self.storage_dir = Path(storage_dir)
        self.storage_dir.mkdir(parents=True, exist_ok=True)

        self.results_file = self.storage_dir / "results.json"

        if not self.results_file.exists():
            self._save_results([])

    def save_result(self, result: Dict) -> None:
        """
        Append one decision result.

        Args:
            result: Dictionary describing the run
                {
                    'timestamp': str,
                    'command': str,
                    'formula': str,
                    'class': str,
                    'verdict': str,
                    'elapsed': float
                }
        """
        results = self._load_results()
        result = dict(result)
        result.setdefault("timestamp", datetime.now().isoformat())
        results.append(result)
        self._save_results(results)
        logger.info("result saved to %s", self.results_file)

    def get_all_results(self) -> List[Dict]:
        return self._load_results()

    def get_results_by_command(self, command: str) -> List[Dict]:
        """
        Get results filtered by subcommand.

        Args:
            command: Subcommand name (sat, valid, ...)

        Returns:
            List of matching results
        """
        return [r for r in self._load_results() if r.get("command") == command]

    def get_statistics(self) -> Dict:
        """
        Summarise stored results.

        Returns:
            Dictionary with:
                - total_runs: int
                - command_counts: dict
                - verdict_counts: dict
                - average_elapsed: float
        """
        results = self._load_results()
        elapsed = [r["elapsed"] for r in results if isinstance(r.get("elapsed"), (int, float))]
        return {
            "total_runs": len(results),
            "command_counts": self._count(r.get("command", "unknown") for r in results),
            "verdict_counts": self._count(r.get("verdict", "unknown") for r in results),
            "average_elapsed": sum(elapsed) / len(elapsed) if elapsed else 0.0,
        }

    def clear_results(self) -> None:
        self._save_results([])
        logger.info("all results cleared from %s", self.results_file)

    def _load_results(self) -> List[Dict]:
        try:
            with open(self.results_file, "r", encoding="utf-8") as f:
                results = json.load(f)
        except (FileNotFoundError, json.JSONDecodeError):
            logger.warning("results file %s unreadable; starting empty", self.results_file)
            return []
        return results if isinstance(results, list) else []

    def _save_results(self, results: List[Dict]) -> None:
        with open(self.results_file, "w", encoding="utf-8") as f:
            json.dump(results, f, indent=2)
            f.write("\n")

    @staticmethod
    def _count(values) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for value in values:
            counts[value] = counts.get(value, 0) + 1
        return counts
