"""Presentation layer - command-line interface and MCP server."""
