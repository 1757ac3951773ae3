"""Schemas Package - Pydantic models for run configuration and reports"""
