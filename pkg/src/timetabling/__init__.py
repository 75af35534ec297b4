"""Course timetabling by integer programming: group refinement, model construction, validation."""
