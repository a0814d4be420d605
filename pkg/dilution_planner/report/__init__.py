# dilution_planner/report/__init__.py
