"""MCP Server entry point."""

import asyncio
import json
import logging
from typing import Any

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from expsum_lab.application.services.pipeline import PipelineService
from expsum_lab.config import settings
from expsum_lab.domain.errors import ConfigError, ExpSumError
from expsum_lab.domain.value_objects.run_config import COMMANDS, RunConfig
from expsum_lab.infrastructure.knowledge.catalog import ExperimentCatalog
from expsum_lab.infrastructure.parsing.frequency_parser import format_tree, parse_frequency_expr, parse_tree
from expsum_lab.infrastructure.reports.writer import plain
from expsum_lab.presentation.cli import COMMAND_HELP

logging.basicConfig(level=settings.log_level)
logger = logging.getLogger(__name__)

pipeline_service = PipelineService()
experiment_catalog = ExperimentCatalog()

CONFIG_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "config": {
            "type": "object",
            "description": "Run config (same JSON as the --config file; 'command' is implied by the tool)",
        },
        "preset": {
            "type": "string",
            "description": "Catalog experiment name, used when 'config' is absent",
        },
    },
}


def create_server() -> Server:
    """Create and configure the MCP server."""
    server = Server("expsum-lab")

    @server.list_tools()
    async def list_tools() -> list[Tool]:
        """List all available tools."""
        tools = [
            Tool(name=f"run_{command}", description=COMMAND_HELP[command], inputSchema=CONFIG_SCHEMA)
            for command in COMMANDS
        ]
        tools.append(
            Tool(
                name="list_experiments",
                description="List the built-in experiment catalog.",
                inputSchema={"type": "object", "properties": {}},
            )
        )
        tools.append(
            Tool(
                name="parse_frequency",
                description="Parse a frequency expression such as '1+2*sqrt(3)' or '3/7'.",
                inputSchema={
                    "type": "object",
                    "properties": {"expression": {"type": "string"}},
                    "required": ["expression"],
                },
            )
        )
        return tools

    @server.call_tool()
    async def call_tool(name: str, arguments: dict[str, Any]) -> list[TextContent]:
        """Handle tool calls."""
        try:
            result = await _handle_tool(name, arguments)
            return [TextContent(type="text", text=json.dumps(plain(result), ensure_ascii=False, indent=2))]
        except ExpSumError as e:
            logger.error(f"Error in tool {name}: {e.qualified_code}: {e.message}")
            return [TextContent(type="text", text=json.dumps(plain(e.to_dict()), ensure_ascii=False))]
        except Exception as e:
            logger.error(f"Error in tool {name}: {e}")
            return [
                TextContent(
                    type="text",
                    text=json.dumps({"error": str(e), "code": "cli_runner.Error"}, ensure_ascii=False),
                )
            ]

    return server


def _config_for(command: str, arguments: dict[str, Any]) -> RunConfig:
    if arguments.get("config") is not None:
        data = dict(arguments["config"])
    elif arguments.get("preset"):
        data = experiment_catalog.get(arguments["preset"])
    else:
        raise ConfigError("Pass 'config' or 'preset'")
    data["command"] = command
    return RunConfig.load(data)


async def _handle_tool(name: str, arguments: dict[str, Any]) -> dict[str, Any]:
    """Route tool calls to the pipeline."""
    if name == "list_experiments":
        return {"experiments": experiment_catalog.describe()}

    elif name == "parse_frequency":
        expression = arguments["expression"]
        entry = parse_frequency_expr(expression)
        return {
            "text": expression,
            "canonical": format_tree(parse_tree(expression)),
            "value": entry.approx,
            "exactness": entry.exactness,
            "exact": str(entry.exact) if entry.exact is not None else None,
        }

    elif name.startswith("run_") and name[4:] in COMMANDS:
        cfg = _config_for(name[4:], arguments)
        artifact = await asyncio.to_thread(pipeline_service.run_pipeline, cfg)
        return artifact.to_dict()

    else:
        return {"error": f"Unknown tool: {name}"}


async def run_server() -> None:
    """Run the MCP server."""
    server = create_server()

    async with stdio_server() as (read_stream, write_stream):
        logger.info("expsum-lab MCP server starting...")
        await server.run(
            read_stream,
            write_stream,
            server.create_initialization_options(),
        )


def main() -> None:
    """Main entry point."""
    asyncio.run(run_server())


if __name__ == "__main__":
    main()
