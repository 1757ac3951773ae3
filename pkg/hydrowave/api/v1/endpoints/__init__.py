"""V1 Endpoints"""
