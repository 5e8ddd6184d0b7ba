"""Replace/Rescale chains linking points of the same type for the coordinate power map."""

from dynamon.moves import connect, point, point_type, ramification_census, transitivity_survey, validate

P, Q = point("1/7", "1", "0"), point("2/7", "4/7", "1")
print("types:", tuple(point_type(P, 2)), tuple(point_type(Q, 2)))
cert = connect(P, Q, 2)
for step in cert.steps:
    print("  ", step.to_json())
print("validates:", validate(cert).ok)

# preperiodic points for d = 3 are connected without passing through Zero
cert = connect(point("1/6", "1", "1"), point("1", "5/6", "1"), 3)
print("d = 3 preperiodic chain of", len(cert.steps), "steps, valid:", validate(cert).ok)

rep = transitivity_survey(2, 2, 1, 2, sample=None, seed=0)
print(f"survey: {rep['checked']} certificates, success rate {rep['success_rate']}")

for row in ramification_census(3, 2, 4)["rows"]:
    print(f"period {row['b']}: {row['zero_free']} of {row['total']} points have no zero coordinate")
