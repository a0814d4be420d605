# dilution_planner/plan/__init__.py
