"""Typed forms with holes, filled one argument at a time.

Whatever the dialogue has not supplied yet is a named hole.  Application
fills the outermost compatible hole, coercing types where a coercion is
sanctioned; a form with no holes left is truth-typed and executable.
"""

from stacktalk import cps_apply, is_saturated, make_form, raise_type
from stacktalk.semantics import (
    BaseType,
    LocationValue,
    ObjectRef,
    default_action_table,
    format_type,
    satisfy_precondition,
)

table = default_action_table()

# put with both slots open: an entity hole, then a location hole
form = make_form(table, "put", None, None)
print(form, ":", format_type(form.type))

step1 = cps_apply(form, ObjectRef("knife1"))
print(step1, ":", format_type(step1.type))

step2 = cps_apply(step1, LocationValue((0, 0, 1.5)))
print(step2, ":", format_type(step2.type), "| saturated:", is_saturated(step2))

# A location can be coerced to an entity ("the spot at ...") when an entity
# hole wants it -- that is how a bare coordinate ends up inside on(...).
nested = make_form(table, "put", ObjectRef("knife1"), make_form(table, "on", None))
print("\n", nested, "applied to a location ->", cps_apply(nested, LocationValue((0, 0, 1.5))))

# grasp evidence lifts to the grasped object and discharges the precondition
pending = make_form(table, "put", None, None)
grasp = make_form(table, "grasp", ObjectRef("cup_blue"))
print("\nraise grasp(cup_blue) to entity ->", raise_type(grasp, BaseType.ENTITY))
after = satisfy_precondition(pending, grasp, table)
print("after the demonstration:", after, "| satisfied:", set(after.satisfied))
