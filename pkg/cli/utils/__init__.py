# CLI utilities
