// Generated by cobval 0.1.0: profile jvm-junit
// program CHANN11 paragraph FIRST-SENTENCE seed 7
import static org.junit.Assert.assertEquals;
import org.junit.Test;

public class ChannelDrain_FirstSentence_Test {
    private final OrderedStubs stubs = OrderedStubs.install();
    private final ChannelDrain target = new ChannelDrain();

    @Test
    public void t001() {
        // -- initialize inputs
        String wsAmount = "00000.00";
        // -- arm order-dependent stubs
        // mock:seq=0 entry=0
        stubs.queue(0, java.util.Map.of("3:0", "00", "var:SQLCODE", "000000000"));
        // mock:seq=1 entry=0
        stubs.queue(1, java.util.Map.of());
        // -- invoke
        target.firstSentence(wsAmount);
        // -- assert
        // assert:prog WS-EXIT-EARLY
        assertEquals(" ", target.wsExitEarly);
        // assert:prog WS-FINAL-CNT
        assertEquals("002", target.wsFinalCnt);
        // assert:prog WS-MSG-COUNT
        assertEquals("001", target.wsMsgCount);
        // assert:prog WS-STATUS-TEXT
        assertEquals("DRAIN-OK    ", target.wsStatusText);
        // assert:prog WS-TOTAL
        assertEquals("0000000.00", target.wsTotal);
        // assert:res call=0 occ=1 var=WS-CNT slot=1:1
        assertEquals("001", stubs.captured(0, 1, "1:1"));
        // assert:res call=1 occ=1 var=LOG-CHANNEL slot=0:0
        assertEquals("CH01", stubs.captured(1, 1, "0:0"));
        // assert:res call=1 occ=1 var=LOG-EARLY-FLAG slot=0:3
        assertEquals(" ", stubs.captured(1, 1, "0:3"));
        // assert:res call=1 occ=1 var=LOG-MSG-COUNT slot=0:1
        assertEquals("001", stubs.captured(1, 1, "0:1"));
        // assert:res call=1 occ=1 var=LOG-TOTAL slot=0:2
        assertEquals("0000000.00", stubs.captured(1, 1, "0:2"));
        // skip:CTL-DRAIN-WINDOW reason=LocalInTarget
        // skip:CTL-MAX-RETRY reason=LocalInTarget
        // skip:CTL-PRIORITY reason=LocalInTarget
        // skip:CTL-REGION reason=LocalInTarget
        // skip:LOG-CHANNEL reason=LocalInTarget
        // skip:LOG-EARLY-FLAG reason=LocalInTarget
        // skip:LOG-MSG-COUNT reason=LocalInTarget
        // skip:LOG-TOTAL reason=LocalInTarget
        // skip:STAT-REGION-TAG reason=LocalInTarget
        // skip:STAT-SLOTS-SEEN reason=LocalInTarget
        // skip:STAT-WINDOW-ID reason=LocalInTarget
        // skip:WS-CHANNEL-ID reason=LocalInTarget
        // skip:WS-CNT reason=LocalInTarget
        // skip:WS-LOOP-ITERATIONS reason=LocalInTarget
        // skip:WS-OPERATOR-NOTE reason=LocalInTarget
        // skip:WS-QSTAT reason=LocalInTarget
        // skip:WS-RUN-MODE reason=LocalInTarget
    }

    @Test
    public void t002() {
        // -- initialize inputs
        String wsAmount = "00000.00";
        // -- arm order-dependent stubs
        // mock:seq=0 entry=0
        stubs.queue(0, java.util.Map.of("3:0", "00", "var:SQLCODE", "-999999999"));
        // mock:seq=1 entry=0
        stubs.queue(1, java.util.Map.of());
        // -- invoke
        target.firstSentence(wsAmount);
        // -- assert
        // assert:prog WS-EXIT-EARLY
        assertEquals("Y", target.wsExitEarly);
        // assert:prog WS-FINAL-CNT
        assertEquals("002", target.wsFinalCnt);
        // assert:prog WS-MSG-COUNT
        assertEquals("000", target.wsMsgCount);
        // assert:prog WS-STATUS-TEXT
        assertEquals("DRAIN-ABORT ", target.wsStatusText);
        // assert:prog WS-TOTAL
        assertEquals("0000000.00", target.wsTotal);
        // assert:res call=0 occ=1 var=WS-CNT slot=1:1
        assertEquals("001", stubs.captured(0, 1, "1:1"));
        // assert:res call=1 occ=1 var=LOG-CHANNEL slot=0:0
        assertEquals("CH01", stubs.captured(1, 1, "0:0"));
        // assert:res call=1 occ=1 var=LOG-EARLY-FLAG slot=0:3
        assertEquals("Y", stubs.captured(1, 1, "0:3"));
        // assert:res call=1 occ=1 var=LOG-MSG-COUNT slot=0:1
        assertEquals("000", stubs.captured(1, 1, "0:1"));
        // assert:res call=1 occ=1 var=LOG-TOTAL slot=0:2
        assertEquals("0000000.00", stubs.captured(1, 1, "0:2"));
        // skip:CTL-DRAIN-WINDOW reason=LocalInTarget
        // skip:CTL-MAX-RETRY reason=LocalInTarget
        // skip:CTL-PRIORITY reason=LocalInTarget
        // skip:CTL-REGION reason=LocalInTarget
        // skip:LOG-CHANNEL reason=LocalInTarget
        // skip:LOG-EARLY-FLAG reason=LocalInTarget
        // skip:LOG-MSG-COUNT reason=LocalInTarget
        // skip:LOG-TOTAL reason=LocalInTarget
        // skip:STAT-REGION-TAG reason=LocalInTarget
        // skip:STAT-SLOTS-SEEN reason=LocalInTarget
        // skip:STAT-WINDOW-ID reason=LocalInTarget
        // skip:WS-CHANNEL-ID reason=LocalInTarget
        // skip:WS-CNT reason=LocalInTarget
        // skip:WS-LOOP-ITERATIONS reason=LocalInTarget
        // skip:WS-OPERATOR-NOTE reason=LocalInTarget
        // skip:WS-QSTAT reason=LocalInTarget
        // skip:WS-RUN-MODE reason=LocalInTarget
    }
}
