"""
Volterra LDP - Resources
Configurações de smoke embutidas no repositório, servidas por URI `bundled:<nome>`.
"""

import json
from pathlib import Path
from typing import Any, Dict, List

from src.api.errors import ConfigError

CONFIGS_DIR = Path(__file__).parent.parent / "configs"

# =============================================================================
# RESOURCES - Configurações embutidas
# =============================================================================


def get_resources_list() -> List[Dict[str, Any]]:
    """Retorna a lista de configurações embutidas disponíveis."""
    resources = []
    for path in sorted(CONFIGS_DIR.glob("*.json")):
        try:
            description = json.loads(path.read_text(encoding="utf-8")).get("description", "")
        except (OSError, json.JSONDecodeError):
            description = ""
        resources.append(
            {
                "uri": f"bundled:{path.stem}",
                "name": path.stem,
                "description": description,
                "mimeType": "application/json",
            }
        )
    return resources


def read_resource(uri: str) -> str:
    """Lê o conteúdo de uma configuração embutida."""
    if not uri.startswith("bundled:"):
        raise ConfigError(f"URI de resource desconhecida: {uri}")
    name = uri[len("bundled:"):]
    path = CONFIGS_DIR / f"{name}.json"
    if not name or "/" in name or not path.is_file():
        available = ", ".join(r["name"] for r in get_resources_list())
        raise ConfigError(f"configuração embutida não encontrada: {name} (disponíveis: {available})")
    return path.read_text(encoding="utf-8")
