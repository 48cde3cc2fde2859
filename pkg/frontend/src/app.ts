// Session flow: fetch the pending design, present it, collect the rating,
// submit, repeat until the service reports the session finished.

import { ApiClient, ApiError } from "./api";
import { playStoppingCue } from "./audio";
import { buildQuestionnaireForm, type QuestionnaireForm } from "./form";
import type { SessionState } from "./types";
import { renderDesign, renderPlaceholder, type VehicleView } from "./vehicle";

export interface AppElements {
  vehicle: Element;
  form: Element;
  status: Element;
  submit: HTMLButtonElement;
  timeToCross: HTMLInputElement;
}

export class RatingApp {
  private session: SessionState | null = null;
  private view: VehicleView | null = null;
  private questionnaire: QuestionnaireForm;
  private submitting = false;

  constructor(
    private readonly api: ApiClient,
    private readonly el: AppElements,
  ) {
    this.questionnaire = buildQuestionnaireForm(el.form);
    this.questionnaire.element.addEventListener("change", () => {
      this.syncSubmitState();
    });
    this.el.submit.addEventListener("click", () => {
      void this.submit();
    });
    this.syncSubmitState();
  }

  get state(): SessionState | null {
    return this.session;
  }

  canSubmit(): boolean {
    return (
      !this.submitting &&
      this.session !== null &&
      !this.session.finished &&
      this.questionnaire.missingItems().length === 0
    );
  }

  private syncSubmitState(): void {
    this.el.submit.disabled = !this.canSubmit();
  }

  async start(sessionId?: string): Promise<void> {
    this.session = sessionId
      ? await this.api.getSession(sessionId)
      : await this.api.createSession();
    this.presentCurrentDesign();
  }

  private presentCurrentDesign(): void {
    const session = this.session;
    if (!session) return;
    this.view?.dispose();
    if (session.finished) {
      void this.showCompletion();
      return;
    }
    if (!session.design) {
      renderPlaceholder(this.el.vehicle, "No design available.");
      return;
    }
    try {
      this.view = renderDesign(this.el.vehicle, session.design.rendering);
    } catch {
      renderPlaceholder(this.el.vehicle, "No design available.");
      this.view = null;
    }
    const audio = playStoppingCue(session.design.rendering.loudness);
    const mode = audio.played ? "" : " (visual-only mode)";
    this.el.status.textContent =
      `Iteration ${session.iteration + 1} of ${session.total_iterations} - ` +
      `${session.phase} phase${mode}`;
    this.questionnaire.reset();
    this.syncSubmitState();
  }

  async submit(): Promise<void> {
    const session = this.session;
    if (!session || !this.canSubmit()) return;
    const payload = this.questionnaire.payload(
      session.iteration + 1,
      Number(this.el.timeToCross.value) || 0,
    );
    if (!payload) return;
    this.submitting = true;
    this.syncSubmitState();
    try {
      this.session = await this.api.submitRating(session.session_id, payload);
      this.presentCurrentDesign();
    } catch (err) {
      this.el.status.textContent =
        err instanceof ApiError ? err.message : "Submission failed.";
    } finally {
      this.submitting = false;
      this.syncSubmitState();
    }
  }

  private async showCompletion(): Promise<void> {
    const session = this.session!;
    const pareto = await this.api.getPareto(session.session_id);
    renderPlaceholder(
      this.el.vehicle,
      session.stopped_early
        ? "Perfect rating: the optimization stopped early."
        : "All iterations complete.",
    );
    this.el.status.textContent =
      `Finished after ${session.iteration} iterations. ` +
      `${pareto.points.length} Pareto-optimal designs, ` +
      `hypervolume ${pareto.hypervolume.toFixed(3)}.`;
    this.el.submit.disabled = true;
  }
}

export function mount(root: Document, baseUrl: string): RatingApp {
  const el: AppElements = {
    vehicle: root.getElementById("vehicle")!,
    form: root.getElementById("questionnaire")!,
    status: root.getElementById("status")!,
    submit: root.getElementById("submit") as HTMLButtonElement,
    timeToCross: root.getElementById("time-to-cross") as HTMLInputElement,
  };
  const app = new RatingApp(new ApiClient(baseUrl), el);
  const sessionId = root.location?.hash?.slice(1) || undefined;
  void app.start(sessionId);
  return app;
}
