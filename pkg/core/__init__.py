# Core module initialization