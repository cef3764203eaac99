# Config module initialization
