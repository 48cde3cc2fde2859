import { FORM_ITEMS, buildQuestionnaireForm, fillAllBest } from "../src/form";

function freshForm() {
  const host = document.createElement("div");
  document.body.appendChild(host);
  return buildQuestionnaireForm(host);
}

describe("questionnaire form", () => {
  it("renders every item with its scale", () => {
    const form = freshForm();
    expect(FORM_ITEMS).toHaveLength(14);
    for (const item of FORM_ITEMS) {
      const row = form.element.querySelector(`[data-item="${item.key}"]`);
      expect(row, item.key).not.toBeNull();
    }
    const trustRadios = form.element.querySelectorAll('input[name="trust_1"]');
    expect(trustRadios).toHaveLength(5);
    const safetyRadios = form.element.querySelectorAll('input[name="safety_1"]');
    expect(safetyRadios).toHaveLength(7);
  });

  it("reports every item missing on a fresh form", () => {
    const form = freshForm();
    expect(form.missingItems()).toHaveLength(FORM_ITEMS.length);
    expect(form.payload(1, 12)).toBeNull();
  });

  it("a single unanswered item blocks the payload", () => {
    const form = freshForm();
    fillAllBest(form);
    expect(form.missingItems()).toHaveLength(0);
    const fresh = freshForm();
    fillAllBest(fresh);
    // un-answer one radio group
    fresh.element
      .querySelectorAll<HTMLInputElement>('input[name="visual_appeal"]')
      .forEach((input) => (input.checked = false));
    expect(fresh.missingItems()).toEqual(["visual_appeal"]);
    expect(fresh.payload(1, 12)).toBeNull();
  });

  it("the untouched mental-demand slider counts as unanswered", () => {
    const form = freshForm();
    fillAllBest(form);
    form.reset();
    expect(form.missingItems()).toHaveLength(FORM_ITEMS.length);
  });

  it("all-best answers produce the perfect-rating payload", () => {
    const form = freshForm();
    fillAllBest(form);
    const payload = form.payload(3, 9.5);
    expect(payload).not.toBeNull();
    expect(payload!).toMatchObject({
      iteration: 3,
      trust_items: [5, 5],
      predictability_items: [5, 5, 1, 1],
      mental_demand: 1,
      safety_items: [3, 3, 3, 3],
      usefulness: 7,
      satisfaction: 7,
      visual_appeal: 7,
      time_to_cross_s: 9.5,
    });
  });

  it("setAnswer rejects out-of-scale values", () => {
    const form = freshForm();
    expect(() => form.setAnswer("trust_1", 6)).toThrow();
    expect(() => form.setAnswer("unknown", 1)).toThrow();
  });
});
