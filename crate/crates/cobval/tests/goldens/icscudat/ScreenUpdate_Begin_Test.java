// Generated by cobval 0.1.0: profile jvm-junit
// program ICSCUDAT paragraph BEGIN seed 7
import static org.junit.Assert.assertEquals;
import org.junit.Test;

public class ScreenUpdate_Begin_Test {
    private final OrderedStubs stubs = OrderedStubs.install();
    private final ScreenUpdate target = new ScreenUpdate();

    @Test
    public void t001() {
        // -- initialize inputs
        String scrSeq = "0000";
        String scrText = "                ";
        String wsSendLen = "000";
        // note: call 0 occurrence 1 is unmatched; no mock emitted
        // note: call 1 occurrence 1 is unmatched; no mock emitted
        // note: call 2 occurrence 1 is unmatched; no mock emitted
        // -- invoke
        target.begin(scrText, scrSeq, wsSendLen);
        // vacuous: no assertable outputs
        // skip:ATTR-BRIGHT reason=LocalInTarget
        // skip:ATTR-DARK reason=LocalInTarget
        // skip:ATTR-PROTECTED reason=LocalInTarget
        // skip:ATTR-UNPROT reason=LocalInTarget
        // skip:GEO-BDY-COL reason=LocalInTarget
        // skip:GEO-BDY-ROW reason=LocalInTarget
        // skip:GEO-HDR-COL reason=LocalInTarget
        // skip:GEO-HDR-ROW reason=LocalInTarget
        // skip:GEO-TRL-COL reason=LocalInTarget
        // skip:GEO-TRL-ROW reason=LocalInTarget
        // skip:JRN-PASS-TAG reason=LocalInTarget
        // skip:JRN-TERMINAL reason=LocalInTarget
        // skip:JRN-TRANSACTION reason=LocalInTarget
        // skip:SCR-FIELD-ID reason=LocalInTarget
        // skip:WS-IDX reason=LocalInTarget
        // skip:WS-SENT-COUNT reason=LocalInTarget
        // skip:SCR-FIELD-ID reason=UnmatchedCall
        // skip:SCR-SEQ reason=UnmatchedCall
        // skip:SCR-TEXT reason=UnmatchedCall
        // skip:WS-SEND-LEN reason=UnmatchedCall
        // skip:SCR-FIELD-ID reason=UnmatchedCall
        // skip:SCR-SEQ reason=UnmatchedCall
        // skip:SCR-TEXT reason=UnmatchedCall
        // skip:WS-SEND-LEN reason=UnmatchedCall
        // skip:SCR-FIELD-ID reason=UnmatchedCall
        // skip:SCR-SEQ reason=UnmatchedCall
        // skip:SCR-TEXT reason=UnmatchedCall
    }
}
