"""Core Package - configuration and errors"""
