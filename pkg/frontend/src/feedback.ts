import type { ApiClient } from "./api";
import { ApiError } from "./api";
import type { FeedbackState } from "./types";

/** State machine behind the rating widget. Guarantees at most one successful
 * submission per response: once rated, further submits are no-ops; a failed
 * submit returns to an error state that allows retrying. */
export class FeedbackController {
  private state: FeedbackState = { kind: "unrated" };

  constructor(
    private api: ApiClient,
    private responseId: string,
    private onChange: (state: FeedbackState) => void = () => {},
  ) {}

  getState(): FeedbackState {
    return this.state;
  }

  /** Whether the widget should accept input in the current state. */
  isLocked(): boolean {
    return this.state.kind === "rated" || this.state.kind === "submitting";
  }

  private setState(state: FeedbackState): void {
    this.state = state;
    this.onChange(state);
  }

  async submit(rating: number, comment?: string): Promise<void> {
    if (this.isLocked()) {
      return;
    }
    if (!Number.isInteger(rating) || rating < 1 || rating > 5) {
      this.setState({ kind: "error", message: "rating must be 1-5" });
      return;
    }
    this.setState({ kind: "submitting" });
    try {
      await this.api.submitFeedback(this.responseId, rating, comment);
      this.setState({ kind: "rated", rating, comment });
    } catch (err) {
      const message =
        err instanceof ApiError ? err.message : "feedback submission failed";
      this.setState({ kind: "error", message });
    }
  }
}
